"""Truncated integer power series, eta-quotient expansion, and Apery sums.

Coefficients are exact integers throughout; modular reduction happens only
at the congruence check.  Multiplication is quadratic, which is fine at the
truncations used here (a few thousand).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .numeric import Residue, mod_inverse

__all__ = ["Series", "eta_expand", "apery", "apery_mod"]


class Series:
    """Integer coefficients c_0..c_N of a series truncated at q**N."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = [int(c) for c in coeffs]
        if not self.coeffs:
            raise ValueError("a series needs at least the constant coefficient")

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> int:
        if not 0 <= i <= self.truncation:
            raise IndexError(f"coefficient {i} beyond truncation {self.truncation}")
        return self.coeffs[i]

    def __eq__(self, other):
        return isinstance(other, Series) and self.coeffs == other.coeffs

    def __add__(self, other):
        N = min(self.truncation, other.truncation)
        return Series([self.coeffs[i] + other.coeffs[i] for i in range(N + 1)])

    def __sub__(self, other):
        N = min(self.truncation, other.truncation)
        return Series([self.coeffs[i] - other.coeffs[i] for i in range(N + 1)])

    def __mul__(self, other):
        N = min(self.truncation, other.truncation)
        a, b = self.coeffs, other.coeffs
        out = [0] * (N + 1)
        for i in range(N + 1):
            ai = a[i]
            if ai:
                for j in range(N + 1 - i):
                    out[i + j] += ai * b[j]
        return Series(out)

    def invert(self) -> "Series":
        """Multiplicative inverse at the same truncation; needs c_0 = +-1 to
        stay in integer coefficients."""
        c0 = self.coeffs[0]
        if c0 not in (1, -1):
            raise ValueError(f"series with constant term {c0} has no integer inverse")
        N = self.truncation
        inv = [0] * (N + 1)
        inv[0] = c0
        for t in range(1, N + 1):
            acc = 0
            for i in range(1, t + 1):
                if self.coeffs[i]:
                    acc += self.coeffs[i] * inv[t - i]
            inv[t] = -c0 * acc
        return Series(inv)

    def __str__(self):
        head = ", ".join(str(c) for c in self.coeffs[:8])
        tail = ", ..." if self.truncation >= 8 else ""
        return f"Series[0..{self.truncation}]({head}{tail})"

    __repr__ = __str__


def eta_expand(factors, lead: int, N: int) -> Series:
    """q**lead times the product over (m, e) of prod_j (1 - q**(m*j))**e,
    truncated at q**N.

    Each sparse factor (1 - q**(m*j)) is multiplied (e > 0) or divided
    (e < 0, series inversion) into the accumulator coefficient-by-coefficient.
    """
    if lead < 0:
        raise ValueError(f"leading power must be >= 0, got {lead}")
    if N < lead:
        raise ValueError(f"truncation {N} below leading power {lead}")
    M = N - lead
    c = [0] * (M + 1)
    c[0] = 1
    for m, e in factors:
        m, e = int(m), int(e)
        if m < 1:
            raise ValueError(f"factor multiplier must be >= 1, got {m}")
        for j in range(1, M // m + 1):
            s = m * j
            if e > 0:
                for _ in range(e):
                    for i in range(M, s - 1, -1):
                        c[i] -= c[i - s]
            else:
                for _ in range(-e):
                    for i in range(s, M + 1):
                        c[i] += c[i - s]
    return Series([0] * lead + c)


def apery(n: int) -> int:
    """A(n) = sum over k of C(n,k)**2 * C(n+k,k)**2, by direct summation."""
    if n < 0:
        raise ValueError(f"apery requires n >= 0, got {n}")
    total = 0
    for k in range(n + 1):
        total += math.comb(n, k) ** 2 * math.comb(n + k, k) ** 2
    return total


def apery_mod(n: int, p: int) -> Residue:
    """A(n) mod p**2 computed purely in modular arithmetic.

    Requires n < p so that k!, (n-k)! and n! are coprime to p; the one
    possible factor p inside (n+k)! is tracked as an explicit valuation
    (its square kills the term mod p**2).
    """
    if n < 0:
        raise ValueError(f"apery_mod requires n >= 0, got {n}")
    if n >= p:
        raise ValueError(
            f"apery_mod requires n < p (got n={n}, p={p}); "
            "fall back to apery(n) reduced mod p**2"
        )
    m = p * p
    top = 2 * n
    # unit part of i! mod p**2 and the p-valuation of i!
    fu = [1] * (top + 1)
    fv = [0] * (top + 1)
    for i in range(1, top + 1):
        unit = i
        v = 0
        while unit % p == 0:
            unit //= p
            v += 1
        fu[i] = fu[i - 1] * unit % m
        fv[i] = fv[i - 1] + v
    inv_fu = [1] * (top + 1)
    inv_fu[top] = mod_inverse(fu[top], m).value
    for i in range(top, 1, -1):
        unit = i
        while unit % p == 0:
            unit //= p
        inv_fu[i - 1] = inv_fu[i] * unit % m
    total = 0
    for k in range(n + 1):
        if fv[n + k] - fv[k] - fv[n] > 0:
            continue  # C(n+k,k) divisible by p, its square vanishes mod p**2
        c1 = fu[n] * inv_fu[k] % m * inv_fu[n - k] % m
        c2 = fu[n + k] * inv_fu[k] % m * inv_fu[n] % m
        total = (total + c1 * c1 % m * (c2 * c2 % m)) % m
    return Residue(total, m)
