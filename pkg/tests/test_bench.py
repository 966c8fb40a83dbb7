import math

import pytest

from corrsketch.bench import (
    CompareConfig,
    GridConfig,
    mult_error,
    pivot_means,
    pivot_table,
    resolve_reference,
    run_comparison,
    run_grid,
)
from corrsketch.cm import EnsembleConfig, cm_ensemble_run
from corrsketch.datagen import DistributionSpec, write_generated
from corrsketch.errors import ConfigurationError, UndefinedReferenceError
from corrsketch.exact import build_table, l2_diff
from corrsketch.stream import open_stream


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    path = tmp_path_factory.mktemp("bench") / "zd.txt"
    write_generated(path, DistributionSpec(40, "dependent", "zipfian", seed=1), 5000)
    return path


def test_mult_error():
    assert mult_error(0.11, 0.10) == pytest.approx(0.1)
    assert mult_error(0.0, 0.5) == 1.0
    assert mult_error(0.5, 0.5) == 0.0
    with pytest.raises(UndefinedReferenceError):
        mult_error(0.1, 0.0)


def test_resolve_reference(small, desk_dir):
    exact = l2_diff(build_table(open_stream(small)))[0]
    assert resolve_reference(small) == exact
    assert resolve_reference(small, 0.5) == 0.5
    with pytest.raises(ConfigurationError):
        resolve_reference(small, cap=10)
    # cached value from the bundle manifest
    assert resolve_reference(desk_dir / "zipfian_dependent.txt", cap=10) > 0


def test_config_validation(small):
    with pytest.raises(ConfigurationError):
        GridConfig(str(small), A_values=[1])
    with pytest.raises(ConfigurationError):
        GridConfig(str(small), B_values=[0])
    with pytest.raises(ConfigurationError):
        CompareConfig(str(small), repeats=0)
    with pytest.raises(ConfigurationError):
        GridConfig(str(small), error_domain="log")


def test_grid_shape_and_pivot(small):
    cfg = GridConfig(str(small), [2, 4], [1, 3], repeats=3, seed=5)
    res = run_grid(cfg)
    assert len(res.records) == 12 and len(res.pivot) == 4
    for p in res.pivot:
        errs = [r.mult_error for r in res.records if (r.A, r.B) == (p["A"], p["B"])]
        assert p["mult_error"] == math.fsum(errs) / 3 and p["repeats"] == 3
    table = pivot_table(res.pivot)
    assert table[0] == ["B", "A=2", "A=4"] and len(table) == 3


def test_grid_deterministic_and_parallel(small):
    a = run_grid(GridConfig(str(small), [2, 8], [1, 4], repeats=2, seed=9))
    b = run_grid(GridConfig(str(small), [2, 8], [1, 4], repeats=2, seed=9, workers=4))
    assert a.records == b.records and a.hashes == b.hashes


def test_single_cell_replay(small):
    cfg = GridConfig(str(small), [4], [3], repeats=2, seed=21)
    rec = run_grid(cfg).records[1]
    res = cm_ensemble_run(EnsembleConfig(4, 3, "median", rec.seed), open_stream(small))
    assert rec.seed == cfg.cell_seed(4, 3, 1) and res.estimate == rec.upsilon


def test_norm_domain(small):
    res = run_grid(GridConfig(str(small), [4], [1], repeats=1, error_domain="norm"))
    rec = res.records[0]
    assert rec.reference == pytest.approx(math.sqrt(res.reference))
    assert rec.mult_error == pytest.approx(abs(math.sqrt(rec.upsilon) - rec.reference) / rec.reference)


def test_comparison(small):
    res = run_comparison(CompareConfig(str(small), [2, 4], repeats=3, seed=1))
    assert [r["A"] for r in res.rows] == [2, 4]
    assert [r["copies"] for r in res.rows] == [4, 16]
    assert len(res.records) == 12
    im = [r for r in res.records if r.estimator == "im" and r.A == 4]
    assert res.rows[1]["im_mult_error"] == math.fsum(r.mult_error for r in im) / 3


def test_pivot_means_order():
    from corrsketch.bench import ErrorRecord
    recs = [ErrorRecord(4, 1, 0, "cm", 1.0, 1.0, 0.5, 0), ErrorRecord(2, 1, 0, "cm", 1.0, 1.0, 0.25, 0),
            ErrorRecord(4, 1, 1, "cm", 1.0, 1.0, 0.75, 0)]
    assert [(p["A"], p["mult_error"]) for p in pivot_means(recs)] == [(4, 0.625), (2, 0.25)]
