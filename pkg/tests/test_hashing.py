import numpy as np
import pytest

from corrsketch.errors import ParameterError
from corrsketch.hashing import (
    MERSENNE_31,
    FourWiseSign,
    UniversalHash,
    eval_sign,
    eval_universal,
    make_fourwise_sign,
    make_universal,
)
from corrsketch.rng import LaneRng

P = MERSENNE_31


def test_eval_universal_examples():
    assert eval_universal(UniversalHash(1, 0, 4, 13), 5) == 1
    assert eval_universal(UniversalHash(3, 7, 4, 13), 2) == 0
    h = UniversalHash(1, 0, 4, 13)
    assert h(1) == h(5) == 1


def test_make_universal_deterministic():
    assert make_universal(4, LaneRng(9)) == make_universal(4, LaneRng(9))


def test_make_universal_rejects_degenerate():
    with pytest.raises(ParameterError):
        make_universal(1, LaneRng(0))


def test_make_universal_distinct_seeds():
    params = {(h.a, h.b) for h in (make_universal(32, LaneRng(s)) for s in range(1000))}
    assert len(params) == 1000


def test_eval_sign_examples():
    assert eval_sign(FourWiseSign(0, 0, 0, 0), 12345) == -1
    assert eval_sign(FourWiseSign(1, 0, 0, 0), 12345) == 1
    assert eval_sign(FourWiseSign(0, 0, 0, 1, 13), 2) == -1


def test_make_fourwise_deterministic():
    assert make_fourwise_sign(LaneRng(4)) == make_fourwise_sign(LaneRng(4))


def test_fourwise_coefficients_uniform_and_distinct():
    M = 10_000
    coeffs = np.array([
        [h.h0, h.h1, h.h2, h.h3] for h in (make_fourwise_sign(LaneRng(s)) for s in range(M))
    ], dtype=np.float64)
    se = P / np.sqrt(12 * M)
    assert np.all(np.abs(coeffs.mean(axis=0) - P / 2) < 5 * se)
    assert len({tuple(r) for r in coeffs.tolist()}) == M


def test_vectorised_matches_scalar():
    rng = LaneRng(2)
    x = np.array([0, 1, 2, 999, P - 1, 2**30], dtype=np.int64)
    for _ in range(20):
        h = make_universal(7, rng)
        s = make_fourwise_sign(rng)
        assert h.many(x).tolist() == [h(int(v)) for v in x]
        assert s.many(x).tolist() == [s(int(v)) for v in x]


def test_ranges():
    rng = LaneRng(8)
    x = np.arange(0, 5000, dtype=np.int64) * 429_497
    for A in (2, 3, 32):
        out = make_universal(A, rng).many(x)
        assert out.min() >= 0 and out.max() < A
    assert set(make_fourwise_sign(rng).many(x).tolist()) <= {-1, 1}


def _sign_draws(M, seed):
    rng = LaneRng(seed)
    hs = [make_fourwise_sign(rng) for _ in range(M)]
    return [np.array([getattr(h, f"h{k}") for h in hs], dtype=np.int64) for k in range(4)]


def _signs(coeffs, x):
    h0, h1, h2, h3 = coeffs
    acc = (h3 * x + h2) % P
    acc = (acc * x + h1) % P
    acc = (acc * x + h0) % P
    return 2 * (acc & 1) - 1


@pytest.fixture(scope="module")
def sign_draws():
    return _sign_draws(100_000, 77)


@pytest.mark.parametrize("keys", [(0, 1, 2, 3), (5, 17, 1000, 2**31 - 2), (3, 9, 27, 81)])
def test_four_wise_product_mean(sign_draws, keys):
    M = sign_draws[0].size
    prod = np.ones(M, dtype=np.int64)
    for x in keys:
        prod *= _signs(sign_draws, x)
    assert abs(prod.mean()) <= 5 / np.sqrt(M) + 8 / P


@pytest.mark.parametrize("x", [0, 1, 123456])
def test_single_sign_bias(sign_draws, x):
    M = sign_draws[0].size
    assert abs(_signs(sign_draws, x).mean() - (-1 / P)) <= 5 / np.sqrt(M)


@pytest.mark.parametrize("A", [2, 5, 32])
def test_universal_bucket_uniformity(A):
    M = 100_000
    rng = LaneRng(100 + A)
    a = np.array([rng.below(P) for _ in range(M)], dtype=np.int64)
    b = np.array([rng.below(P) for _ in range(M)], dtype=np.int64)
    key = 4242
    freq = np.bincount((a * key + b) % P % A, minlength=A) / M
    se = np.sqrt((1 / A) * (1 - 1 / A) / M)
    assert np.all(np.abs(freq - 1 / A) <= 5 * se)
