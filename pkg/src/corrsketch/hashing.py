"""Hash families over 0-based symbols.

Both families work modulo the Mersenne prime ``2**31 - 1`` by default, so
every intermediate product stays below ``2**62`` and fits a signed 64-bit
integer (numpy ``int64`` in the vectorised paths).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParameterError
from .rng import LaneRng

MERSENNE_31 = 2**31 - 1


@dataclass(frozen=True)
class UniversalHash:
    """``x -> ((a*x + b) mod p) mod A``."""

    a: int
    b: int
    A: int
    p: int = MERSENNE_31

    def __post_init__(self):
        if self.A < 2:
            raise ParameterError(f"bucket count A={self.A} must be >= 2")
        if not (0 <= self.a < self.p and 0 <= self.b < self.p):
            raise ParameterError("hash coefficients must lie in [0, p)")

    def __call__(self, x: int) -> int:
        return ((self.a * x + self.b) % self.p) % self.A

    def many(self, x: np.ndarray) -> np.ndarray:
        return (self.a * x + self.b) % self.p % self.A

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FourWiseSign:
    """``x -> +1/-1`` from the parity of a random cubic mod p."""

    h0: int
    h1: int
    h2: int
    h3: int
    p: int = MERSENNE_31

    def __post_init__(self):
        if not all(0 <= h < self.p for h in (self.h0, self.h1, self.h2, self.h3)):
            raise ParameterError("sign-hash coefficients must lie in [0, p)")

    def residue(self, x: int) -> int:
        p = self.p
        acc = self.h3
        acc = (acc * x + self.h2) % p
        acc = (acc * x + self.h1) % p
        return (acc * x + self.h0) % p

    def __call__(self, x: int) -> int:
        return 2 * (self.residue(x) & 1) - 1

    def many(self, x: np.ndarray) -> np.ndarray:
        p = self.p
        acc = (self.h3 * x + self.h2) % p
        acc = (acc * x + self.h1) % p
        acc = (acc * x + self.h0) % p
        return 2 * (acc & 1) - 1

    def to_dict(self) -> dict:
        return asdict(self)


def make_universal(A: int, rng: LaneRng, p: int = MERSENNE_31) -> UniversalHash:
    if A < 2:
        raise ParameterError(f"bucket count A={A} must be >= 2")
    a = rng.below(p)
    b = rng.below(p)
    return UniversalHash(a, b, A, p)


def identity_universal(A: int) -> UniversalHash:
    """a=1, b=0: x -> x mod A. Injective on [0, A); for oracle checks."""
    return UniversalHash(1, 0, A)


def eval_universal(h: UniversalHash, x: int) -> int:
    return h(x)


def make_fourwise_sign(rng: LaneRng, p: int = MERSENNE_31) -> FourWiseSign:
    h0, h1, h2, h3 = (rng.below(p) for _ in range(4))
    return FourWiseSign(h0, h1, h2, h3, p)


def eval_sign(h: FourWiseSign, x: int) -> int:
    return h(x)
