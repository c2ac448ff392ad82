"""Exact scalar arithmetic: harmonic numbers, binomials, residues mod m.

Everything here is built on Python's arbitrary-precision ``int`` and
``fractions.Fraction``; both already satisfy the canonical-form contract
(reduced, positive denominator, unique zero) that the rest of the package
relies on for structural equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class NotInvertibleError(ValueError):
    """Raised when asked to invert a residue that shares a factor with the modulus."""


# Prefix sums of 1/i, extended on demand.  Semantically invisible: harmonic()
# always returns the same Fraction whether or not the cache was warm.
_HARMONIC_CACHE: list[Fraction] = [Fraction(0)]


def harmonic(m: int) -> Fraction:
    """Return the harmonic number H_m = sum(1/i for i in 1..m); H_0 = 0."""
    if m < 0:
        raise ValueError(f"harmonic number undefined for negative index {m}")
    while len(_HARMONIC_CACHE) <= m:
        i = len(_HARMONIC_CACHE)
        _HARMONIC_CACHE.append(_HARMONIC_CACHE[-1] + Fraction(1, i))
    return _HARMONIC_CACHE[m]


def binomial(n: int, k: int) -> int:
    """Binomial coefficient C(n, k), with C(n, k) = 0 outside 0 <= k <= n.

    The zero convention outside the support window is what lets summands be
    summed over all integers k without boundary bookkeeping.
    """
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: returns (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@dataclass(frozen=True)
class Residue:
    """An integer residue in [0, modulus), typically modulo p**2."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other.value
        return int(other)

    def __add__(self, other):
        return Residue(self.value + self._coerce(other), self.modulus)

    def __sub__(self, other):
        return Residue(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other):
        return Residue(self.value * self._coerce(other), self.modulus)

    __radd__ = __add__
    __rmul__ = __mul__

    def inverse(self) -> "Residue":
        return mod_inverse(self.value, self.modulus)

    def __repr__(self):
        return f"{self.value} (mod {self.modulus})"


def mod_inverse(a: int, m: int) -> Residue:
    """Inverse of a modulo m via extended gcd; raises if gcd(a, m) != 1."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    g, x, _ = xgcd(a % m, m)
    if g != 1:
        raise NotInvertibleError(f"{a} is not invertible mod {m} (gcd = {g})")
    return Residue(x % m, m)


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit, by sieve of Eratosthenes."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, flag in enumerate(sieve) if flag]
