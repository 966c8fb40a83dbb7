"""Seeded generators for the four benchmark dataset families.

Random-variate consumption (documented so other ports can replay it):

* random / independent:  ``p = u[0:n]``, ``q = u[n:2n]``, each normalised.
* random / dependent:    ``s = u[0:n*n]`` in row-major order, normalised.
* zipfian / independent: ``perm_p = permutation(n)``, then ``perm_q = permutation(n)``;
  rank ``k`` (0-based) gets weight ``1/(k+1)`` and lands on symbol ``perm[k]``.
* zipfian / dependent:   ``perm = permutation(n*n)`` over row-major cells.
* sampling: ``N`` uniforms for rows, then ``N`` uniforms for columns
  (independent), or ``N`` uniforms for cells (dependent); each is mapped
  through the cumulative array with a right-sided binary search.

Materialisation uses ``LaneRng(seed)``; sampling uses its own seed.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .rng import LaneRng, derive_seed
from .stream import StreamHeader, write_stream

DEPENDENCE = ("independent", "dependent")
SHAPES = ("random", "zipfian")

SCALES = {"full": (10_000, 1_000_000), "desk": (1_000, 100_000)}


@dataclass(frozen=True)
class DistributionSpec:
    n: int
    dependence: str = "independent"
    shape: str = "random"
    seed: int = 0
    identity_perm: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError(f"alphabet size n={self.n} must be >= 2")
        if self.dependence not in DEPENDENCE:
            raise ParameterError(f"dependence must be one of {DEPENDENCE}")
        if self.shape not in SHAPES:
            raise ParameterError(f"shape must be one of {SHAPES}")


@dataclass
class MaterializedDistribution:
    """Either marginals ``p`` and ``q`` (independent) or a joint ``s`` (dependent)."""

    n: int
    p: np.ndarray | None = None
    q: np.ndarray | None = None
    s: np.ndarray | None = None

    @property
    def dependent(self) -> bool:
        return self.s is not None

    def joint(self) -> np.ndarray:
        if self.s is not None:
            return self.s
        return np.outer(self.p, self.q)


def zipf_weights(m: int) -> np.ndarray:
    """Weights ``1/k`` for ranks ``k = 1..m``, normalised by the harmonic sum."""
    w = 1.0 / np.arange(1, m + 1, dtype=np.float64)
    return w / _blocked_fsum(w)


def _blocked_fsum(x: np.ndarray, block: int = 1 << 20) -> float:
    return math.fsum(x[k:k + block].sum() for k in range(0, x.size, block))


def _normalise(x: np.ndarray) -> np.ndarray:
    return x / _blocked_fsum(x.ravel())


def _zipf_assign(m: int, rng: LaneRng, identity: bool) -> np.ndarray:
    w = zipf_weights(m)
    if identity:
        return w
    perm = rng.permutation(m)
    out = np.empty(m, dtype=np.float64)
    out[perm] = w
    return out


def materialize(spec: DistributionSpec) -> MaterializedDistribution:
    n = spec.n
    rng = LaneRng(spec.seed)
    if spec.dependence == "independent":
        if spec.shape == "random":
            u = rng.random(2 * n)
            return MaterializedDistribution(n, p=_normalise(u[:n]), q=_normalise(u[n:]))
        p = _zipf_assign(n, rng, spec.identity_perm)
        q = _zipf_assign(n, rng, spec.identity_perm)
        return MaterializedDistribution(n, p=p, q=q)
    if spec.shape == "random":
        s = _normalise(rng.random(n * n))
    else:
        s = _zipf_assign(n * n, rng, spec.identity_perm)
    return MaterializedDistribution(n, s=s.reshape(n, n))


def _inverse_cdf(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(weights)
    idx = np.searchsorted(cum, u * cum[-1], side="right")
    return np.minimum(idx, weights.size - 1)


def sample_stream(dist: MaterializedDistribution, N: int, seed: int) -> np.ndarray:
    """Draw ``N`` pairs; returns a 1-based ``(N, 2)`` int64 array."""
    if N < 1:
        raise ParameterError(f"stream length N={N} must be >= 1")
    rng = LaneRng(seed)
    n = dist.n
    out = np.empty((N, 2), dtype=np.int64)
    if dist.dependent:
        cells = _inverse_cdf(dist.s.ravel(), rng.random(N))
        out[:, 0] = cells // n + 1
        out[:, 1] = cells % n + 1
    else:
        out[:, 0] = _inverse_cdf(dist.p, rng.random(N)) + 1
        out[:, 1] = _inverse_cdf(dist.q, rng.random(N)) + 1
    return out


def generate(spec: DistributionSpec, N: int) -> np.ndarray:
    """Materialise ``spec`` and sample ``N`` pairs with a derived sampling seed."""
    return sample_stream(materialize(spec), N, derive_seed(spec.seed, 1))


def write_generated(path: str | os.PathLike, spec: DistributionSpec, N: int) -> None:
    write_stream(path, StreamHeader(spec.n, N), generate(spec, N))


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    shape: str
    dependence: str
    n: int
    N: int
    seed: int
    path: str
    l2: float
    l2_squared: float


MANIFEST_FIELDS = ["name", "shape", "dependence", "n", "N", "seed", "path", "l2", "l2_squared"]


def dataset_name(shape: str, dependence: str) -> str:
    return f"{shape}_{dependence}"


def make_paper_datasets(out_dir: str | os.PathLike, scale: str = "desk",
                        seed: int = 0) -> list[DatasetEntry]:
    """Write the four (shape x dependence) streams plus ``manifest.csv``.

    The manifest caches each dataset's exact l2 reference so benchmarks do
    not need to recompute it.
    """
    from .exact import build_table, l2_diff
    from .stream import open_stream

    if scale not in SCALES:
        raise ParameterError(f"scale must be one of {tuple(SCALES)}")
    n, N = SCALES[scale]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    k = 0
    for shape in SHAPES:
        for dep in ("dependent", "independent"):
            ds_seed = derive_seed(seed, k)
            k += 1
            spec = DistributionSpec(n, dep, shape, ds_seed)
            name = dataset_name(shape, dep)
            path = out / f"{name}.txt"
            write_generated(path, spec, N)
            l2sq, l2 = l2_diff(build_table(open_stream(path)))
            entries.append(DatasetEntry(name, shape, dep, n, N, ds_seed, path.name, l2, l2sq))
    write_manifest(out / "manifest.csv", entries)
    return entries


def write_manifest(path: str | os.PathLike, entries: list[DatasetEntry]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_FIELDS)
        for e in entries:
            w.writerow([e.name, e.shape, e.dependence, e.n, e.N, e.seed, e.path,
                        repr(e.l2), repr(e.l2_squared)])


def read_manifest(path: str | os.PathLike) -> list[DatasetEntry]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [
        DatasetEntry(r["name"], r["shape"], r["dependence"], int(r["n"]), int(r["N"]),
                     int(r["seed"]), r["path"], float(r["l2"]), float(r["l2_squared"]))
        for r in rows
    ]
