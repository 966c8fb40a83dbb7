"""Sign sketch baseline (three accumulators per copy).

With random signs ``x_i``, ``y_j`` the sketch keeps

    t1 = sum x_i y_j,   t2 = sum x_i,   t3 = sum y_j

over the stream, and ``(t1/N - t2 t3 / N^2)^2`` is unbiased for the squared
l2 distance when the signs are 4-wise independent. Signs come from
:class:`~corrsketch.hashing.FourWiseSign` evaluated on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import AGGREGATORS, EnsembleResult, aggregate, fan_out
from .errors import BoundsError, EmptyStreamError, ParameterError
from .hashing import FourWiseSign, make_fourwise_sign
from .rng import LaneRng, child_seed
from .stream import DEFAULT_CHUNK, MAX_N, SamplePair, StreamSource


@dataclass(frozen=True)
class ImEstimate:
    upsilon: float
    t_value: float


class SignSketch:
    def __init__(self, hx: FourWiseSign, hy: FourWiseSign, n: int | None = None):
        self.hx = hx
        self.hy = hy
        self.n = n
        # Python ints: exact regardless of stream length
        self.t1 = 0
        self.t2 = 0
        self.t3 = 0
        self.N = 0

    def update(self, pair: SamplePair) -> "SignSketch":
        i, j = pair
        limit = self.n if self.n is not None else MAX_N
        if not (1 <= i <= limit and 1 <= j <= limit):
            raise BoundsError(f"pair ({i}, {j}) outside [1, {limit}]")
        sx = self.hx(i - 1)
        sy = self.hy(j - 1)
        self.t1 += sx * sy
        self.t2 += sx
        self.t3 += sy
        self.N += 1
        return self

    def update_many(self, rows: np.ndarray, cols: np.ndarray) -> "SignSketch":
        sx = self.hx.many(rows)
        sy = self.hy.many(cols)
        self.t1 += int(np.dot(sx, sy))
        self.t2 += int(sx.sum())
        self.t3 += int(sy.sum())
        self.N += int(rows.size)
        return self

    def estimate(self) -> ImEstimate:
        if self.N == 0:
            raise EmptyStreamError("empty stream: N = 0")
        N = self.N
        # exact integer numerator; one correctly rounded division
        t = (self.t1 * N - self.t2 * self.t3) / (N * N)
        return ImEstimate(t * t, t)

    def params(self) -> dict:
        return {"hx": self.hx.to_dict(), "hy": self.hy.to_dict()}


def im_new(rng: LaneRng, n: int | None = None) -> SignSketch:
    hx = make_fourwise_sign(rng)
    hy = make_fourwise_sign(rng)
    return SignSketch(hx, hy, n)


def im_update(s: SignSketch, pair: SamplePair) -> SignSketch:
    return s.update(pair)


def im_estimate(s: SignSketch) -> ImEstimate:
    return s.estimate()


@dataclass(frozen=True)
class ImConfig:
    copies: int = 1
    aggregator: str = "mean"
    seed: int = 0

    def __post_init__(self):
        if self.copies < 1:
            raise ParameterError(f"copies={self.copies} must be >= 1")
        if self.aggregator not in AGGREGATORS:
            raise ParameterError(f"unknown aggregator {self.aggregator!r}")

    def run_seed(self, k: int) -> int:
        return child_seed(self.seed, k)

    def new_sketches(self, n: int | None = None) -> list[SignSketch]:
        return [im_new(LaneRng(self.run_seed(k)), n) for k in range(self.copies)]


def im_ensemble_run(cfg: ImConfig, src: StreamSource,
                    chunk_size: int = DEFAULT_CHUNK) -> EnsembleResult:
    sketches = cfg.new_sketches(src.n)
    N, elapsed = fan_out(sketches, src, chunk_size)
    per_run = [sk.estimate().upsilon for sk in sketches]
    return EnsembleResult(aggregate(per_run, cfg.aggregator), per_run, sketches, N, elapsed)
