"""Counter-matrix sketch for the squared l2 distance between a joint
distribution and the product of its marginals.

Each pair ``(i, j)`` increments ``C[h1(i), h2(j)]`` in an ``A x A`` grid.
At query time the grid is treated as a compressed contingency table:

    raw     = sum_xy (C_xy/N - R_x K_y / N^2)^2
    upsilon = raw / (1 - 1/A)^2

where ``R``/``K`` are row/column sums. The division removes the downward
bias caused by colliding rows and columns, so ``upsilon`` is unbiased for
the exact squared distance over random hash draws.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensemble import AGGREGATORS, EnsembleResult, aggregate, fan_out
from .errors import BoundsError, EmptyStreamError, MergeError, ParameterError
from .hashing import UniversalHash, identity_universal, make_universal
from .rng import LaneRng, child_seed
from .stream import DEFAULT_CHUNK, MAX_N, SamplePair, StreamSource

_INT_SAFE_N = 3_037_000_499


@dataclass(frozen=True)
class CmEstimate:
    upsilon: float
    raw_l2sq: float
    N: int


class CounterMatrix:
    def __init__(self, A: int, h1: UniversalHash, h2: UniversalHash, n: int | None = None):
        if A < 2:
            raise ParameterError(f"counter matrix side A={A} must be > 1")
        if h1.A != A or h2.A != A:
            raise ParameterError("hash bucket counts must equal A")
        self.A = A
        self.h1 = h1
        self.h2 = h2
        self.n = n
        self.cells = np.zeros((A, A), dtype=np.int64)
        self.N = 0

    def update(self, pair: SamplePair) -> "CounterMatrix":
        i, j = pair
        limit = self.n if self.n is not None else MAX_N
        if not (1 <= i <= limit and 1 <= j <= limit):
            raise BoundsError(f"pair ({i}, {j}) outside [1, {limit}]")
        self.cells[self.h1(i - 1), self.h2(j - 1)] += 1
        self.N += 1
        return self

    def update_many(self, rows: np.ndarray, cols: np.ndarray) -> "CounterMatrix":
        """Add a batch of 0-based pairs (already bounds-checked by the reader)."""
        A = self.A
        idx = self.h1.many(rows) * A + self.h2.many(cols)
        self.cells += np.bincount(idx, minlength=A * A).reshape(A, A)
        self.N += int(rows.size)
        return self

    def estimate(self) -> CmEstimate:
        if self.N == 0:
            raise EmptyStreamError("empty stream: N = 0")
        N = self.N
        C = self.cells
        if N <= _INT_SAFE_N:
            num = C * N - np.outer(C.sum(axis=1), C.sum(axis=0))
        else:
            C = C.astype(object)
            num = C * N - np.outer(C.sum(axis=1), C.sum(axis=0))
        ratio = num.astype(np.float64) / float(N) ** 2
        raw = math.fsum((ratio * ratio).ravel().tolist())
        return CmEstimate(raw / (1.0 - 1.0 / self.A) ** 2, raw, N)

    def compatible(self, other: "CounterMatrix") -> bool:
        return self.A == other.A and self.h1 == other.h1 and self.h2 == other.h2

    def merge(self, other: "CounterMatrix") -> "CounterMatrix":
        if not self.compatible(other):
            raise MergeError("cannot merge counter matrices with different A or hash parameters")
        out = CounterMatrix(self.A, self.h1, self.h2, self.n)
        out.cells = self.cells + other.cells
        out.N = self.N + other.N
        return out

    def params(self) -> dict:
        return {"A": self.A, "h1": self.h1.to_dict(), "h2": self.h2.to_dict()}


def cm_new(A: int, rng: LaneRng, n: int | None = None, *, identity_hash: bool = False) -> CounterMatrix:
    """Fresh zeroed sketch with two independent bucket hashes drawn from ``rng``.

    ``identity_hash`` substitutes ``a=1, b=0`` for both (test-only).
    """
    if A < 2:
        raise ParameterError(f"counter matrix side A={A} must be > 1")
    if identity_hash:
        return CounterMatrix(A, identity_universal(A), identity_universal(A), n)
    h1 = make_universal(A, rng)
    h2 = make_universal(A, rng)
    return CounterMatrix(A, h1, h2, n)


def cm_update(m: CounterMatrix, pair: SamplePair) -> CounterMatrix:
    return m.update(pair)


def cm_estimate(m: CounterMatrix) -> CmEstimate:
    return m.estimate()


def cm_merge(m1: CounterMatrix, m2: CounterMatrix) -> CounterMatrix:
    return m1.merge(m2)


@dataclass(frozen=True)
class EnsembleConfig:
    A: int
    B: int = 1
    aggregator: str = "median"
    seed: int = 0
    identity_hash: bool = False

    def __post_init__(self):
        if self.A < 2:
            raise ParameterError(f"A={self.A} must be >= 2")
        if self.B < 1:
            raise ParameterError(f"B={self.B} must be >= 1")
        if self.aggregator not in AGGREGATORS:
            raise ParameterError(f"unknown aggregator {self.aggregator!r}")

    def run_seed(self, b: int) -> int:
        return child_seed(self.seed, b)

    def new_sketches(self, n: int | None = None) -> list[CounterMatrix]:
        return [
            cm_new(self.A, LaneRng(self.run_seed(b)), n, identity_hash=self.identity_hash)
            for b in range(self.B)
        ]


def _finish(cfg: EnsembleConfig, sketches, N, elapsed) -> EnsembleResult:
    per_run = [sk.estimate().upsilon for sk in sketches]
    return EnsembleResult(aggregate(per_run, cfg.aggregator), per_run, sketches, N, elapsed)


def cm_ensemble_run(cfg: EnsembleConfig, src: StreamSource,
                    chunk_size: int = DEFAULT_CHUNK) -> EnsembleResult:
    """Run ``cfg.B`` sketches over one pass of ``src`` and aggregate."""
    sketches = cfg.new_sketches(src.n)
    N, elapsed = fan_out(sketches, src, chunk_size)
    return _finish(cfg, sketches, N, elapsed)


def cm_ensemble_run_sharded(cfg: EnsembleConfig, shards: list[StreamSource],
                            workers: int | None = None,
                            chunk_size: int = DEFAULT_CHUNK) -> EnsembleResult:
    """Ingest disjoint shards independently (optionally on threads), then merge.

    Agrees exactly with :func:`cm_ensemble_run` over the concatenated stream.
    """
    if not shards:
        raise EmptyStreamError("no shards given")
    n = shards[0].n

    def ingest(shard):
        sketches = cfg.new_sketches(n)
        for rows, cols in shard.chunks(chunk_size):
            for sk in sketches:
                sk.update_many(rows, cols)
        return sketches

    t0 = time.perf_counter()
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(ingest, shards))
    else:
        parts = [ingest(s) for s in shards]
    merged = parts[0]
    for part in parts[1:]:
        merged = [a.merge(b) for a, b in zip(merged, part)]
    N = merged[0].N
    if N == 0:
        raise EmptyStreamError("empty stream: N = 0")
    return _finish(cfg, merged, N, time.perf_counter() - t0)


def cm_params_from_eps_delta(eps: float, delta: float) -> tuple[int, int]:
    """Side length and repetition count giving a (1 +- eps) estimate w.p. 1 - delta."""
    if not 0 < eps <= 1:
        raise ParameterError(f"eps={eps} must lie in (0, 1]")
    if not 0 < delta < 1:
        raise ParameterError(f"delta={delta} must lie in (0, 1)")
    return math.ceil(32.0 / eps**2), math.ceil(32.0 * math.log(2.0 / delta))
