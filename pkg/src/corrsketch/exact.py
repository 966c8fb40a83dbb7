"""Exact n x n contingency table and the estimators computed from it.

This is the ground truth every sketch is checked against. Memory is O(n^2)
by design, guarded by ``cap`` (default 20000 symbols).

Entries of the delta matrix are formed as ``(n_ij * N - r_i * c_j) / N**2``
with the numerator computed in exact integer arithmetic, so tables that are
exact products give exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, EmptyStreamError, ParameterError
from .stream import SamplePair, StreamSource

DEFAULT_CAP = 20000
# largest N for which n_ij * N and r_i * c_j cannot overflow int64
_INT_SAFE_N = 3_037_000_499
_BLOCK_CELLS = 1 << 22

Z_95 = 1.6448536269514722


class ExactTable:
    def __init__(self, n: int, cap: int = DEFAULT_CAP):
        if n < 2:
            raise ParameterError(f"alphabet size n={n} must be >= 2")
        if n > cap:
            raise ParameterError(
                f"exact oracle needs O(n^2) memory; n={n} exceeds the cap of {cap}")
        self.n = n
        self.counts = np.zeros((n, n), dtype=np.int64)
        self.row_sums = np.zeros(n, dtype=np.int64)
        self.col_sums = np.zeros(n, dtype=np.int64)
        self.N = 0

    def ingest(self, pair: SamplePair) -> "ExactTable":
        i, j = pair
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise BoundsError(f"pair ({i}, {j}) outside [1, {self.n}]")
        self.counts[i - 1, j - 1] += 1
        self.row_sums[i - 1] += 1
        self.col_sums[j - 1] += 1
        self.N += 1
        return self

    def ingest_arrays(self, rows: np.ndarray, cols: np.ndarray) -> "ExactTable":
        """Add a batch of 0-based pairs."""
        if rows.size == 0:
            return self
        if rows.min() < 0 or cols.min() < 0 or rows.max() >= self.n or cols.max() >= self.n:
            raise BoundsError(f"batch contains symbols outside [1, {self.n}]")
        flat = rows * self.n + cols
        cells, hits = np.unique(flat, return_counts=True)
        self.counts.ravel()[cells] += hits
        self.row_sums += np.bincount(rows, minlength=self.n)
        self.col_sums += np.bincount(cols, minlength=self.n)
        self.N += int(rows.size)
        return self

    def _require_data(self):
        if self.N == 0:
            raise EmptyStreamError("empty stream: N = 0")

    def _numerator_blocks(self):
        """Yield (row_slice, D) with D = n_ij*N - r_i*c_j as float64."""
        self._require_data()
        N = self.N
        step = max(1, _BLOCK_CELLS // self.n)
        for start in range(0, self.n, step):
            sl = slice(start, min(self.n, start + step))
            r = self.row_sums[sl]
            if N <= _INT_SAFE_N:
                d = self.counts[sl] * N - np.outer(r, self.col_sums)
                yield sl, d.astype(np.float64)
            else:
                d = self.counts[sl].astype(np.float64) * float(N)
                yield sl, d - np.outer(r.astype(np.float64), self.col_sums.astype(np.float64))


@dataclass(frozen=True)
class ExactReport:
    p_hat: np.ndarray
    q_hat: np.ndarray
    l1: float
    l2: float
    l2_squared: float
    chi2: float
    dof: int
    chi2_critical: float
    reject_independence: bool

    def csv_row(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "l2_squared": self.l2_squared,
            "chi2": self.chi2,
            "dof": self.dof,
            "chi2_critical": self.chi2_critical,
            "reject_independence": self.reject_independence,
        }


def new_table(n: int, cap: int = DEFAULT_CAP) -> ExactTable:
    return ExactTable(n, cap)


def oracle_ingest(table: ExactTable, pair: SamplePair) -> ExactTable:
    return table.ingest(pair)


def build_table(source: StreamSource, cap: int = DEFAULT_CAP) -> ExactTable:
    table = ExactTable(source.n, cap)
    for rows, cols in source.chunks():
        table.ingest_arrays(rows, cols)
    return table


def delta_matrix(table: ExactTable) -> np.ndarray:
    """Full delta matrix s_ij - p_i q_j as float64 (n x n)."""
    out = np.empty((table.n, table.n), dtype=np.float64)
    scale = float(table.N) ** 2
    for sl, d in table._numerator_blocks():
        out[sl] = d / scale
    return out


def l1_diff(table: ExactTable) -> float:
    partials = []
    for _, d in table._numerator_blocks():
        partials.extend(np.abs(d).sum(axis=1).tolist())
    return math.fsum(partials) / float(table.N) ** 2


def l2_diff(table: ExactTable) -> tuple[float, float]:
    """Return ``(l2_squared, l2)``."""
    partials = []
    scale = float(table.N) ** 2
    for _, d in table._numerator_blocks():
        d = d / scale
        partials.extend((d * d).sum(axis=1).tolist())
    sq = math.fsum(partials)
    return sq, math.sqrt(sq)


def chi_squared(table: ExactTable) -> tuple[float, int]:
    """Pearson statistic ``N * sum (s - pq)^2 / (pq)`` and ``(n-1)**2`` dof.

    Cells whose expected product is zero contribute nothing.
    """
    partials = []
    c = table.col_sums.astype(np.float64)
    for sl, d in table._numerator_blocks():
        expected = np.outer(table.row_sums[sl].astype(np.float64), c)
        mask = expected > 0
        terms = np.zeros_like(d)
        terms[mask] = d[mask] ** 2 / expected[mask]
        partials.extend(terms.sum(axis=1).tolist())
    return math.fsum(partials) / float(table.N), (table.n - 1) ** 2


def chi2_critical(dof: int, alpha: float = 0.05) -> float:
    """Upper ``alpha`` critical value via the Wilson-Hilferty approximation."""
    if dof < 1:
        raise ParameterError("dof must be >= 1")
    if alpha != 0.05:
        raise ParameterError(f"unsupported significance level {alpha}; only 0.05")
    k = 2.0 / (9.0 * dof)
    return dof * (1.0 - k + Z_95 * math.sqrt(k)) ** 3


def exact_report(table: ExactTable) -> ExactReport:
    table._require_data()
    l2sq, l2 = l2_diff(table)
    chi2, dof = chi_squared(table)
    crit = chi2_critical(dof)
    return ExactReport(
        p_hat=table.row_sums / table.N,
        q_hat=table.col_sums / table.N,
        l1=l1_diff(table),
        l2=l2,
        l2_squared=l2sq,
        chi2=chi2,
        dof=dof,
        chi2_critical=crit,
        reject_independence=chi2 > crit,
    )
