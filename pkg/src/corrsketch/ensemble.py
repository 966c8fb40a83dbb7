"""Plumbing shared by the two sketch ensembles: fan-out ingestion and aggregation."""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyStreamError, ParameterError
from .stream import DEFAULT_CHUNK, StreamSource

AGGREGATORS = ("median", "mean")


def aggregate(values: Sequence[float], how: str) -> float:
    if not values:
        raise EmptyStreamError("nothing to aggregate")
    if how == "median":
        return float(statistics.median(values))
    if how == "mean":
        return math.fsum(values) / len(values)
    raise ParameterError(f"unknown aggregator {how!r}; expected one of {AGGREGATORS}")


@dataclass
class EnsembleResult:
    estimate: float
    per_run: list[float]
    sketches: list = field(repr=False, default_factory=list)
    N: int = 0
    elapsed: float = 0.0

    @property
    def updates_per_sec(self) -> float:
        """Sketch updates (pairs x replicas) per wall-clock second of ingestion."""
        if self.elapsed <= 0:
            return math.inf
        return self.N * len(self.sketches) / self.elapsed


def fan_out(sketches: list, source: StreamSource, chunk_size: int = DEFAULT_CHUNK) -> tuple[int, float]:
    """Feed every chunk of ``source`` to every sketch in one pass.

    Returns ``(pairs_read, ingestion_seconds)``.
    """
    N = 0
    elapsed = 0.0
    for rows, cols in source.chunks(chunk_size):
        t0 = time.perf_counter()
        for sk in sketches:
            sk.update_many(rows, cols)
        elapsed += time.perf_counter() - t0
        N += int(rows.size)
    if N == 0:
        raise EmptyStreamError("empty stream: N = 0")
    return N, elapsed
