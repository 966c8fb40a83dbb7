"""Streaming estimation of the l2 distance between a joint distribution and
the product of its marginals."""

__version__ = "0.1.0"

from .cm import (  # noqa: E402
    CmEstimate,
    CounterMatrix,
    EnsembleConfig,
    cm_ensemble_run,
    cm_estimate,
    cm_merge,
    cm_new,
    cm_params_from_eps_delta,
    cm_update,
)
from .exact import (  # noqa: E402
    ExactReport,
    ExactTable,
    build_table,
    chi2_critical,
    chi_squared,
    delta_matrix,
    exact_report,
    l1_diff,
    l2_diff,
    oracle_ingest,
)
from .im import ImConfig, ImEstimate, SignSketch, im_ensemble_run, im_estimate, im_new, im_update  # noqa: E402
from .rng import LaneRng, child_seed  # noqa: E402
from .stream import SamplePair, StreamHeader, StreamSource, open_stream, write_stream  # noqa: E402
