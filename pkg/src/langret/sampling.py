"""Seeded random rationals.

The generator is SplitMix64, spelled out here so the streams are fixed
independently of the Python version:

    state <- state + 0x9E3779B97F4A7C15          (mod 2^64)
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9    (mod 2^64)
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB    (mod 2^64)
    output z ^ (z >> 31)

Bounded integers use rejection sampling on the raw 64-bit output.
Independent sub-streams come from ``Rng.derive(*keys)``: each key (int, or
str hashed with 64-bit FNV-1a) is xored into the state and one output is
drawn, so a stream depends only on its seed and key path.
"""

from __future__ import annotations

from typing import Sequence

from . import exact_linalg as la
from .exact_linalg import Q, Rational
from .root_data import AlphaVec, ObtuseBasis, pairing

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

PROFILES = ("generic", "dominant", "positive", "boundary")
DEFAULT_NUM = 20
DEFAULT_DEN = 6


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


class Rng:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def derive(self, *keys: int | str) -> "Rng":
        state = self.state
        for key in keys:
            k = fnv1a64(key) if isinstance(key, str) else key & MASK
            sub = Rng(state ^ k)
            state = sub.next_u64()
        return Rng(state)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            v = self.next_u64()
            if v < limit:
                return lo + v % span

    def chance(self, num: int, den: int) -> bool:
        return self.randint(1, den) <= num

    def choice(self, seq: Sequence):
        return seq[self.randint(0, len(seq) - 1)]

    def rational(self, lo: int = -DEFAULT_NUM, hi: int = DEFAULT_NUM, den: int = DEFAULT_DEN) -> Rational:
        return Q(self.randint(lo, hi), self.randint(1, den))

    def positive_rational(self, hi: int = DEFAULT_NUM, den: int = DEFAULT_DEN) -> Rational:
        return Q(self.randint(1, hi), self.randint(1, den))

    def sample(self, k: int, n: int) -> list[int]:
        """``k`` distinct values from ``range(n)``, partial Fisher-Yates."""
        pool = list(range(n))
        for i in range(k):
            j = self.randint(i, n - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])


def _nonneg_coeffs(rng: Rng, n: int, num: int, den: int) -> list[Rational]:
    # a quarter of the coefficients vanish so samples also land on walls
    return [la.ZERO if rng.chance(1, 4) else Q(rng.randint(0, num), rng.randint(1, den)) for _ in range(n)]


def sample_vector(
    B: ObtuseBasis,
    rng: Rng,
    profile: str = "generic",
    num: int = DEFAULT_NUM,
    den: int = DEFAULT_DEN,
) -> AlphaVec:
    n = B.rank
    if profile == "generic":
        return tuple(rng.rational(-num, num, den) for _ in range(n))
    if profile == "positive":
        return tuple(_nonneg_coeffs(rng, n, num, den))
    if profile == "dominant":
        t = _nonneg_coeffs(rng, n, num, den)
        return la.matvec(B.dual, t)
    if profile == "boundary":
        x = list(rng.rational(-num, num, den) for _ in range(n))
        k = rng.randint(0, n - 1)
        x[k] -= pairing(B, x)[k] / B.gram[k][k]
        return tuple(x)
    raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")
