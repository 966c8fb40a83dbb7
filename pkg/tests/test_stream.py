import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrsketch.errors import BoundsError, FormatError, LengthMismatchError, StreamConsumedError
from corrsketch.stream import (
    SamplePair,
    StreamHeader,
    StreamSource,
    open_stream,
    read_all,
    write_stream,
)


def _write(tmp_path, text, name="s.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_open_basic(tmp_path):
    src = open_stream(_write(tmp_path, "#corrstream n=2 N=2\n1 1\n2 2"))
    assert src.header == StreamHeader(2, 2)
    assert list(src) == [SamplePair(1, 1), SamplePair(2, 2)]


def test_bounds_error_names_line(tmp_path):
    src = open_stream(_write(tmp_path, "#corrstream n=2 N=1\n3 1"))
    with pytest.raises(BoundsError) as exc:
        list(src)
    assert exc.value.line == 2
    assert "line 2" in str(exc.value)


def test_bounds_error_later_chunk(tmp_path):
    body = "1\t1\n" * 10 + "1\t0\n"
    src = open_stream(_write(tmp_path, "#corrstream n=2 N=11\n" + body))
    with pytest.raises(BoundsError) as exc:
        for _ in src.chunks(chunk_size=4):
            pass
    assert exc.value.line == 12


def test_length_mismatch(tmp_path):
    with pytest.raises(LengthMismatchError):
        list(open_stream(_write(tmp_path, "#corrstream n=2 N=5\n1 1")))
    with pytest.raises(LengthMismatchError):
        list(open_stream(_write(tmp_path, "#corrstream n=2 N=1\n1 1\n2 2\n", "b.txt")))


@pytest.mark.parametrize("text", [
    "corrstream n=2 N=1\n1 1",
    "#corrstream N=1\n1 1",
    "#corrstream n=1 N=1\n1 1",
    "",
])
def test_malformed_header(tmp_path, text):
    with pytest.raises(FormatError):
        open_stream(_write(tmp_path, text))


def test_malformed_record(tmp_path):
    src = open_stream(_write(tmp_path, "#corrstream n=3 N=2\n1 1\n2 x\n"))
    with pytest.raises(FormatError, match="line 3"):
        list(src)


def test_header_without_length(tmp_path):
    src = open_stream(_write(tmp_path, "#corrstream n=3\n1\t2\n3\t3\n"))
    assert src.header.N_declared is None
    assert read_all(src).tolist() == [[1, 2], [3, 3]]


def test_single_pass(tmp_path):
    src = open_stream(_write(tmp_path, "#corrstream n=2 N=1\n1\t1\n"))
    list(src)
    with pytest.raises(StreamConsumedError):
        list(src)
    assert list(src.reopen()) == [SamplePair(1, 1)]


def test_chunks_are_zero_based(tmp_path):
    src = open_stream(_write(tmp_path, "#corrstream n=3 N=2\n1\t3\n2\t1\n"))
    (rows, cols), = list(src.chunks())
    assert rows.tolist() == [0, 1] and cols.tolist() == [2, 0]


def test_write_roundtrip(tmp_path):
    p = tmp_path / "r.txt"
    write_stream(p, StreamHeader(2), [(1, 2)])
    assert p.read_text() == "#corrstream n=2 N=1\n1\t2\n"
    assert list(open_stream(p)) == [SamplePair(1, 2)]


def test_write_empty(tmp_path):
    p = tmp_path / "e.txt"
    write_stream(p, StreamHeader(2), [])
    src = open_stream(p)
    assert src.header.N_declared == 0
    assert list(src) == []


def test_write_rejects_out_of_bounds(tmp_path):
    with pytest.raises(BoundsError):
        write_stream(tmp_path / "x.txt", StreamHeader(2), [(1, 3)])


def test_write_declared_length_mismatch(tmp_path):
    with pytest.raises(LengthMismatchError):
        write_stream(tmp_path / "x.txt", StreamHeader(2, 3), [(1, 1)])


def test_from_pairs_chunks_match_iteration():
    pairs = np.array([[1, 2], [2, 1], [3, 3]])
    assert list(StreamSource.from_pairs(3, pairs)) == [SamplePair(*p) for p in pairs.tolist()]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 50).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=60))))
def test_roundtrip_property(tmp_path_factory, case):
    n, pairs = case
    p = tmp_path_factory.mktemp("rt") / "s.txt"
    write_stream(p, StreamHeader(n), pairs)
    src = open_stream(p)
    assert src.header == StreamHeader(n, len(pairs))
    assert [tuple(x) for x in src] == pairs
