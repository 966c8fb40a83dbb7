"""Benchmark harness: the (A, B) grid and the equal-space cm vs im comparison.

Every cell derives its seed from the run seed and its coordinates, so any
single record can be replayed in isolation. CSV outputs contain no timing
and are byte-identical across reruns; throughput goes to the optional JSON
manifest only.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cm import EnsembleConfig, cm_ensemble_run
from .errors import ConfigurationError, UndefinedReferenceError
from .exact import DEFAULT_CAP, build_table, l2_diff
from .im import ImConfig, im_ensemble_run
from .rng import derive_seed
from .stream import open_stream

ERROR_DOMAINS = ("squared", "norm")

RECORD_FIELDS = ["A", "B", "repeat", "estimator", "upsilon", "reference",
                 "mult_error", "seed", "error_domain"]


def fmt(x) -> str:
    """Shortest round-trip text for floats; plain str otherwise."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def mult_error(estimate: float, reference: float) -> float:
    """``|estimate - reference| / reference``."""
    if not reference > 0:
        raise UndefinedReferenceError(
            f"multiplicative error undefined for reference={reference!r}")
    return abs(estimate - reference) / reference


@dataclass(frozen=True)
class ErrorRecord:
    A: int
    B: int
    repeat: int
    estimator: str
    upsilon: float
    reference: float
    mult_error: float
    seed: int
    error_domain: str = "squared"

    def row(self) -> list[str]:
        return [fmt(getattr(self, f)) for f in RECORD_FIELDS]


@dataclass
class RunStats:
    """Wall-clock ingestion totals per estimator (not written to CSV)."""

    updates: dict = field(default_factory=lambda: {"cm": 0, "im": 0})
    seconds: dict = field(default_factory=lambda: {"cm": 0.0, "im": 0.0})

    def add(self, estimator: str, result) -> None:
        self.updates[estimator] += result.N * len(result.sketches)
        self.seconds[estimator] += result.elapsed

    def updates_per_sec(self, estimator: str) -> float | None:
        s = self.seconds[estimator]
        if self.updates[estimator] == 0:
            return None
        return self.updates[estimator] / s if s > 0 else math.inf


def resolve_reference(dataset: str | os.PathLike, reference: float | None = None,
                      cap: int = DEFAULT_CAP) -> float:
    """Exact squared l2 reference for ``dataset``.

    Order: explicit value, sibling ``manifest.csv`` entry, exact oracle pass.
    """
    if reference is not None:
        return float(reference)
    path = Path(dataset)
    manifest = path.parent / "manifest.csv"
    if manifest.exists():
        from .datagen import read_manifest
        for entry in read_manifest(manifest):
            if entry.path == path.name:
                return entry.l2_squared
    src = open_stream(path)
    if src.n > cap:
        raise ConfigurationError(
            f"no cached reference for {path} and n={src.n} exceeds the oracle cap {cap}")
    return l2_diff(build_table(src, cap))[0]


def _in_domain(upsilon: float, reference_sq: float, domain: str) -> tuple[float, float]:
    if domain == "squared":
        return upsilon, reference_sq
    if domain == "norm":
        return math.sqrt(upsilon), math.sqrt(reference_sq)
    raise ConfigurationError(f"error domain must be one of {ERROR_DOMAINS}")


def _record(estimator, A, B, repeat, seed, upsilon, reference_sq, domain) -> ErrorRecord:
    est, ref = _in_domain(upsilon, reference_sq, domain)
    return ErrorRecord(A, B, repeat, estimator, upsilon, ref, mult_error(est, ref), seed, domain)


@dataclass
class GridConfig:
    dataset: str
    A_values: list[int] = field(default_factory=lambda: [2, 4, 8, 16, 32])
    B_values: list[int] = field(default_factory=lambda: [1, 4, 16, 64, 256])
    repeats: int = 5
    seed: int = 0
    aggregator: str = "median"
    error_domain: str = "squared"
    reference: float | None = None
    workers: int = 1

    def __post_init__(self):
        if any(a < 2 for a in self.A_values):
            raise ConfigurationError("all A values must be >= 2")
        if any(b < 1 for b in self.B_values):
            raise ConfigurationError("all B values must be >= 1")
        if self.repeats < 1:
            raise ConfigurationError("repeats must be >= 1")
        if self.error_domain not in ERROR_DOMAINS:
            raise ConfigurationError(f"error domain must be one of {ERROR_DOMAINS}")

    def cell_seed(self, A: int, B: int, repeat: int) -> int:
        return derive_seed(self.seed, A, B, repeat)


@dataclass
class GridResult:
    records: list[ErrorRecord]
    pivot: list[dict]
    reference: float
    stats: RunStats
    hashes: list[dict]


def _map_ordered(fn, items, workers: int):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_grid(cfg: GridConfig) -> GridResult:
    ref = resolve_reference(cfg.dataset, cfg.reference)
    cells = [(A, B, r) for A in cfg.A_values for B in cfg.B_values for r in range(cfg.repeats)]

    def run_cell(cell):
        A, B, r = cell
        seed = cfg.cell_seed(A, B, r)
        res = cm_ensemble_run(EnsembleConfig(A, B, cfg.aggregator, seed), open_stream(cfg.dataset))
        return cell, seed, res

    stats = RunStats()
    records, hashes = [], []
    for (A, B, r), seed, res in _map_ordered(run_cell, cells, cfg.workers):
        stats.add("cm", res)
        records.append(_record("cm", A, B, r, seed, res.estimate, ref, cfg.error_domain))
        hashes.append({"A": A, "B": B, "repeat": r, "seed": seed,
                       "sketches": [sk.params() for sk in res.sketches]})
    return GridResult(records, pivot_means(records), ref, stats, hashes)


def pivot_means(records: list[ErrorRecord]) -> list[dict]:
    """Mean multiplicative error over repeats per (estimator, A, B), in first-seen order."""
    groups: dict[tuple, list[float]] = {}
    for rec in records:
        groups.setdefault((rec.estimator, rec.A, rec.B), []).append(rec.mult_error)
    return [
        {"A": A, "B": B, "estimator": est,
         "mult_error": math.fsum(errs) / len(errs), "repeats": len(errs)}
        for (est, A, B), errs in groups.items()
    ]


@dataclass
class CompareConfig:
    dataset: str
    A_values: list[int] = field(default_factory=lambda: [2, 4, 8, 16, 32])
    repeats: int = 10
    seed: int = 0
    cm_aggregator: str = "median"
    im_aggregator: str = "mean"
    error_domain: str = "squared"
    reference: float | None = None
    workers: int = 1

    def __post_init__(self):
        if any(a < 2 for a in self.A_values):
            raise ConfigurationError("all A values must be >= 2")
        if self.repeats < 1:
            raise ConfigurationError("repeats must be >= 1")
        if self.error_domain not in ERROR_DOMAINS:
            raise ConfigurationError(f"error domain must be one of {ERROR_DOMAINS}")


@dataclass
class CompareResult:
    rows: list[dict]
    records: list[ErrorRecord]
    reference: float
    stats: RunStats
    hashes: list[dict]


COMPARE_FIELDS = ["A", "copies", "repeats", "cm_mult_error", "im_mult_error"]


def run_comparison(cfg: CompareConfig) -> CompareResult:
    """cm(A, B=1) against the mean of A**2 sign-sketch copies, at matched space."""
    ref = resolve_reference(cfg.dataset, cfg.reference)
    cells = [(A, r) for A in cfg.A_values for r in range(cfg.repeats)]

    def run_cell(cell):
        A, r = cell
        cm_seed = derive_seed(cfg.seed, A, r, 0)
        im_seed = derive_seed(cfg.seed, A, r, 1)
        cm_res = cm_ensemble_run(EnsembleConfig(A, 1, cfg.cm_aggregator, cm_seed),
                                 open_stream(cfg.dataset))
        im_res = im_ensemble_run(ImConfig(A * A, cfg.im_aggregator, im_seed),
                                 open_stream(cfg.dataset))
        return cell, (cm_seed, cm_res), (im_seed, im_res)

    stats = RunStats()
    records, hashes = [], []
    for (A, r), (cs, cres), (is_, ires) in _map_ordered(run_cell, cells, cfg.workers):
        stats.add("cm", cres)
        stats.add("im", ires)
        records.append(_record("cm", A, 1, r, cs, cres.estimate, ref, cfg.error_domain))
        records.append(_record("im", A, A * A, r, is_, ires.estimate, ref, cfg.error_domain))
        hashes.append({"A": A, "repeat": r, "cm_seed": cs, "im_seed": is_,
                       "cm": [sk.params() for sk in cres.sketches],
                       "im": [sk.params() for sk in ires.sketches]})
    rows = []
    for A in cfg.A_values:
        cm_errs = [x.mult_error for x in records if x.A == A and x.estimator == "cm"]
        im_errs = [x.mult_error for x in records if x.A == A and x.estimator == "im"]
        rows.append({"A": A, "copies": A * A, "repeats": cfg.repeats,
                     "cm_mult_error": math.fsum(cm_errs) / len(cm_errs),
                     "im_mult_error": math.fsum(im_errs) / len(im_errs)})
    return CompareResult(rows, records, ref, stats, hashes)


def write_records(path: str | os.PathLike, records: list[ErrorRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for rec in records:
            w.writerow(rec.row())


def write_dicts(path: str | os.PathLike, rows: list[dict], fields: list[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for row in rows:
            w.writerow([fmt(row[f]) for f in fields])


PIVOT_FIELDS = ["A", "B", "estimator", "mult_error", "repeats"]


def pivot_table(pivot: list[dict]) -> list[list[str]]:
    """Human-readable layout: one row per B, one column per A."""
    As = sorted({p["A"] for p in pivot})
    Bs = sorted({p["B"] for p in pivot})
    cell = {(p["A"], p["B"]): p["mult_error"] for p in pivot}
    rows = [["B"] + [f"A={a}" for a in As]]
    for b in Bs:
        rows.append([f"B={b}"] + [f"{cell[(a, b)]:.6f}" if (a, b) in cell else "" for a in As])
    return rows


def write_manifest(path: str | os.PathLike, *, command: str, config, reference: float,
                   hashes: list[dict], stats: RunStats | None = None) -> None:
    """Replay metadata. Throughput is included only when ``stats`` is given."""
    doc = {
        "tool": "corrsketch",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "command": command,
        "config": dataclasses.asdict(config),
        "reference_l2_squared": reference,
        "hash_prime": 2**31 - 1,
        "cells": hashes,
    }
    if stats is not None:
        doc["throughput"] = {
            est: {"updates": stats.updates[est], "seconds": stats.seconds[est],
                  "updates_per_sec": stats.updates_per_sec(est)}
            for est in ("cm", "im")
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
