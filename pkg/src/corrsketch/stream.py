"""Pair-stream data model and the ``#corrstream`` text format.

File layout::

    #corrstream n=<n> N=<N>
    <i>\t<j>
    ...

Symbols are 1-based on disk and in :class:`SamplePair`; chunked readers hand
out 0-based ``int64`` arrays, which is what the sketches consume.
"""

from __future__ import annotations

import io
import itertools
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import (
    BoundsError,
    FormatError,
    LengthMismatchError,
    StreamConsumedError,
    WriteError,
)

MAX_N = 2**31 - 2
DEFAULT_CHUNK = 1 << 16

_HEADER_RE = re.compile(r"^#corrstream n=(\d+)(?: N=(\d+))?\s*$")


class SamplePair(NamedTuple):
    i: int
    j: int


@dataclass(frozen=True)
class StreamHeader:
    n: int
    N_declared: int | None = None

    def __post_init__(self):
        if not 2 <= self.n <= MAX_N:
            raise FormatError(f"alphabet size n={self.n} outside [2, {MAX_N}]")
        if self.N_declared is not None and self.N_declared < 0:
            raise FormatError("declared stream length must be non-negative")

    def format(self) -> str:
        if self.N_declared is None:
            return f"#corrstream n={self.n}"
        return f"#corrstream n={self.n} N={self.N_declared}"


def parse_header(line: str) -> StreamHeader:
    m = _HEADER_RE.match(line.rstrip("\r\n"))
    if m is None:
        raise FormatError(f"malformed header line: {line.strip()[:80]!r}")
    N = int(m.group(2)) if m.group(2) is not None else None
    return StreamHeader(int(m.group(1)), N)


class StreamSource:
    """A single-pass source of sample pairs.

    Iterate it for :class:`SamplePair` values or call :meth:`chunks` for
    0-based index arrays. Either way the pairs can be consumed only once;
    reopen the file (or call :meth:`reopen`) to read them again.
    """

    def __init__(self, header: StreamHeader, chunk_factory, path: Path | None = None):
        self.header = header
        self.path = path
        self._chunk_factory = chunk_factory
        self._consumed = False

    @property
    def n(self) -> int:
        return self.header.n

    @classmethod
    def from_pairs(cls, n: int, pairs, *, declare_length: bool = True) -> "StreamSource":
        """In-memory source over 1-based pairs (validated up front)."""
        arr = as_pair_array(pairs)
        check_bounds(arr, n)
        header = StreamHeader(n, len(arr) if declare_length else None)

        def factory(chunk_size):
            for start in range(0, len(arr), chunk_size):
                block = arr[start:start + chunk_size]
                yield block[:, 0] - 1, block[:, 1] - 1

        return cls(header, factory)

    def chunks(self, chunk_size: int = DEFAULT_CHUNK) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        if self._consumed:
            raise StreamConsumedError("stream already consumed; reopen it to read again")
        self._consumed = True
        return self._chunk_factory(chunk_size)

    def __iter__(self) -> Iterator[SamplePair]:
        for rows, cols in self.chunks():
            for i, j in zip(rows.tolist(), cols.tolist()):
                yield SamplePair(i + 1, j + 1)

    def reopen(self) -> "StreamSource":
        if self.path is None:
            raise StreamConsumedError("in-memory sources cannot be reopened")
        return open_stream(self.path)


def as_pair_array(pairs) -> np.ndarray:
    """Coerce pairs (SamplePairs, tuples or an (N, 2) array) to int64 (N, 2)."""
    if isinstance(pairs, np.ndarray):
        arr = pairs.astype(np.int64, copy=False)
    else:
        arr = np.array([tuple(p) for p in pairs], dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FormatError("pairs must have shape (N, 2)")
    return arr


def check_bounds(arr: np.ndarray, n: int, first_line: int | None = None) -> None:
    if arr.size == 0:
        return
    bad = (arr < 1) | (arr > n)
    if bad.any():
        k = int(np.flatnonzero(bad.any(axis=1))[0])
        i, j = arr[k].tolist()
        if first_line is None:
            raise BoundsError(f"pair #{k + 1} ({i}, {j}) outside [1, {n}]")
        line = first_line + k
        raise BoundsError(f"line {line}: pair ({i}, {j}) outside [1, {n}]", line=line)


def _parse_block(lines: list[str], first_line: int) -> np.ndarray:
    try:
        flat = np.array(" ".join(lines).split(), dtype=np.int64)
    except (ValueError, OverflowError):
        flat = None
    if flat is None or flat.size != 2 * len(lines):
        for k, line in enumerate(lines):
            fields = line.split()
            if len(fields) != 2 or not all(f.lstrip("-").isdigit() for f in fields):
                raise FormatError(f"line {first_line + k}: malformed record {line.strip()[:80]!r}")
        raise FormatError(f"malformed record near line {first_line}")
    return flat.reshape(-1, 2)


def open_stream(path: str | os.PathLike) -> StreamSource:
    """Open a ``#corrstream`` file; the header is validated immediately."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = parse_header(fh.readline())

    def factory(chunk_size):
        with path.open("r", encoding="utf-8") as fh:
            fh.readline()
            line_no = 2
            seen = 0
            while True:
                lines = [ln for ln in itertools.islice(fh, chunk_size)]
                if not lines:
                    break
                if len(lines) < chunk_size:
                    # trailing blank lines at EOF are tolerated
                    while lines and not lines[-1].strip():
                        lines.pop()
                if not lines:
                    break
                block = _parse_block(lines, line_no)
                check_bounds(block, header.n, first_line=line_no)
                line_no += len(lines)
                seen += len(block)
                if header.N_declared is not None and seen > header.N_declared:
                    raise LengthMismatchError(
                        f"more than the declared N={header.N_declared} records")
                yield block[:, 0] - 1, block[:, 1] - 1
            if header.N_declared is not None and seen != header.N_declared:
                raise LengthMismatchError(
                    f"declared N={header.N_declared} but found {seen} records")

    return StreamSource(header, factory, path=path)


def read_all(source: StreamSource) -> np.ndarray:
    """Drain a source into a 1-based (N, 2) array. Small streams only."""
    parts = [np.stack([r + 1, c + 1], axis=1) for r, c in source.chunks()]
    if not parts:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(parts)


def write_stream(path: str | os.PathLike, header: StreamHeader,
                 pairs: Iterable | np.ndarray) -> None:
    arr = as_pair_array(pairs)
    check_bounds(arr, header.n)
    if header.N_declared is None:
        header = StreamHeader(header.n, len(arr))
    elif header.N_declared != len(arr):
        raise LengthMismatchError(
            f"header declares N={header.N_declared} but {len(arr)} pairs given")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header.format() + "\n")
            for start in range(0, len(arr), DEFAULT_CHUNK):
                block = arr[start:start + DEFAULT_CHUNK]
                buf = io.StringIO()
                np.savetxt(buf, block, fmt="%d", delimiter="\t")
                fh.write(buf.getvalue())
    except OSError as exc:
        raise WriteError(f"cannot write stream to {path}: {exc}") from exc
