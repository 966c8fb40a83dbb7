"""Portable, seedable 64-bit random number generation.

Everything random in corrsketch flows through :class:`LaneRng` so that a run
is reproducible bit-for-bit from its integer seed, in any language.

Algorithm (all arithmetic modulo 2**64):

* ``fmix64(z)``: the SplitMix64 output function
  ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31``.
* SplitMix64 stream of a seed: the k-th output (k = 1, 2, ...) is
  ``fmix64(seed + k * 0x9E3779B97F4A7C15)``.
* Seed splitting: ``child_seed(seed, b) = seed XOR fmix64(b + 0x9E3779B97F4A7C15)``.
* :class:`LaneRng` runs ``LANES = 1024`` independent xoshiro256** generators.
  Lane ``l`` starts from SplitMix64 outputs ``4l+1 .. 4l+4`` of the seed (as
  state words s0..s3).  Each step advances every lane once; the step's
  outputs are emitted in lane order, and steps are concatenated.  The result
  is a single 64-bit sequence; every draw consumes a prefix of what remains.
* ``random()`` maps an output ``x`` to ``(x >> 11) * 2**-53``.
* ``below(bound)`` takes the top ``bound.bit_length()`` bits of successive
  outputs and rejects values ``>= bound``.
* ``permutation(m)`` draws ``m`` outputs, keeps their top 32 bits as sort keys
  and returns the stable argsort (ties broken by position).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
LANES = 1024

_U = np.uint64


def fmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _fmix64_vec(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> _U(30))
    z = z * _U(0xBF58476D1CE4E5B9)
    z = z ^ (z >> _U(27))
    z = z * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


def splitmix64_outputs(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of the SplitMix64 stream started at ``seed``."""
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _fmix64_vec(_U(seed & MASK64) + k * _U(GOLDEN_GAMMA))


def child_seed(seed: int, index: int) -> int:
    """Derive the seed of sub-run ``index``; replayable in isolation."""
    return (seed & MASK64) ^ fmix64(index + GOLDEN_GAMMA)


def derive_seed(seed: int, *path: int) -> int:
    """Apply :func:`child_seed` along a path of indices."""
    for index in path:
        seed = child_seed(seed, index)
    return seed


def _rotl(x: np.ndarray, k: int) -> np.ndarray:
    return (x << _U(k)) | (x >> _U(64 - k))


class Xoshiro256StarStar:
    """Scalar reference xoshiro256** (pure Python ints).

    Used to cross-check the vectorised lanes; too slow for bulk draws.
    """

    def __init__(self, state: tuple[int, int, int, int]):
        self.s = [int(w) & MASK64 for w in state]

    def next(self) -> int:
        s = self.s
        x = (s[1] * 5) & MASK64
        result = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = ((s[3] << 45) | (s[3] >> 19)) & MASK64
        return result


class LaneRng:
    """Lane-parallel xoshiro256** generator seeded through SplitMix64."""

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & MASK64
        words = splitmix64_outputs(self.seed, 4 * LANES).reshape(LANES, 4)
        self._s0 = words[:, 0].copy()
        self._s1 = words[:, 1].copy()
        self._s2 = words[:, 2].copy()
        self._s3 = words[:, 3].copy()
        self._buf = np.empty(0, dtype=np.uint64)
        self._pos = 0

    def _step(self) -> np.ndarray:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        result = _rotl(s1 * _U(5), 7) * _U(9)
        t = s1 << _U(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        self._s3 = _rotl(s3, 45)
        return result

    def u64(self, size: int) -> np.ndarray:
        """Next ``size`` raw 64-bit outputs as a uint64 array."""
        size = int(size)
        avail = self._buf.size - self._pos
        if size <= avail:
            out = self._buf[self._pos:self._pos + size]
            self._pos += size
            return out.copy()
        head = self._buf[self._pos:]
        need = size - avail
        steps = -(-need // LANES)
        block = np.empty((steps, LANES), dtype=np.uint64)
        with np.errstate(over="ignore"):
            for k in range(steps):
                block[k] = self._step()
        flat = block.ravel()
        out = np.concatenate([head, flat[:need]])
        self._buf = flat
        self._pos = need
        return out

    def next_u64(self) -> int:
        return int(self.u64(1)[0])

    def random(self, size: int | None = None):
        """Uniform doubles in [0, 1)."""
        if size is None:
            return (self.next_u64() >> 11) * 2.0 ** -53
        return (self.u64(size) >> _U(11)).astype(np.float64) * 2.0 ** -53

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection on the top bits."""
        if bound < 1:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        bits = (bound - 1).bit_length()
        while True:
            v = self.next_u64() >> (64 - bits)
            if v < bound:
                return v

    def permutation(self, m: int) -> np.ndarray:
        keys = (self.u64(m) >> _U(32)).astype(np.uint32)
        return np.argsort(keys, kind="stable")

    def spawn(self, index: int) -> "LaneRng":
        return LaneRng(child_seed(self.seed, index))
