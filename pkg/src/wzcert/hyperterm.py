"""Proper hypergeometric terms: factorial powers of integer-linear forms in
n and k, times a rational-function prefactor.

The factor list is kept sorted with duplicate arguments merged, so two terms
built from different-looking text compare equal exactly when they denote the
same function.  Reciprocal factorials of negative integers are zero by the
support convention, which is what lets definite sums over 0 <= k <= n be
read as sums over all integers k.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .parsing import LinearForm, ParseError, parse_symvalue, render_linear
from .poly import Poly, RatFunc, shift_var

__all__ = ["HyperTerm", "parse_term", "shift_quotient", "eval_term"]


class HyperTerm:
    """prefactor(n,k) * product of (a*n + b*k + c)! ** exp."""

    __slots__ = ("factors", "prefactor")

    def __init__(self, factors, prefactor=1):
        merged: dict[LinearForm, int] = {}
        items = factors.items() if isinstance(factors, dict) else factors
        for arg, exp in items:
            arg = (int(arg[0]), int(arg[1]), int(arg[2]))
            e = merged.get(arg, 0) + int(exp)
            if e:
                merged[arg] = e
            else:
                merged.pop(arg, None)
        self.factors: tuple[tuple[LinearForm, int], ...] = tuple(
            sorted(merged.items(), key=lambda it: it[0], reverse=True)
        )
        pre = prefactor if isinstance(prefactor, RatFunc) else RatFunc(prefactor)
        if pre.is_zero():
            raise ValueError("hypergeometric term must have a nonzero prefactor")
        self.prefactor = pre

    def __eq__(self, other):
        if not isinstance(other, HyperTerm):
            return NotImplemented
        return self.factors == other.factors and self.prefactor == other.prefactor

    def __hash__(self):
        return hash((self.factors, self.prefactor))

    def __mul__(self, other):
        """Multiply by a Poly/RatFunc prefactor (e.g. attach the k of a summand)."""
        return HyperTerm(dict(self.factors), self.prefactor * other)

    def shift_quotient(self, var: str) -> RatFunc:
        """t(var+1)/t(var) as a normalized rational function.

        Uses (m+1)!/m! = m+1 factor-wise; the prefactor ratio is folded in.
        """
        pos = {"n": 0, "k": 1}[var]
        quotient = RatFunc.const(1)
        for (a, b, c), exp in self.factors:
            step = (a, b)[pos]
            if step == 0:
                continue
            if step > 0:
                block = Poly.const(1)
                for i in range(1, step + 1):
                    block = block * Poly.linear(a, b, c + i)
                quotient = quotient * RatFunc(block) ** exp
            else:
                block = Poly.const(1)
                for i in range(0, -step):
                    block = block * Poly.linear(a, b, c - i)
                quotient = quotient * RatFunc(block) ** (-exp)
        return quotient * (shift_var(self.prefactor, var, 1) / self.prefactor)

    def eval(self, n0: int, k0: int) -> Fraction:
        """Exact value at integer (n0, k0) under the support convention."""
        for (a, b, c), exp in self.factors:
            if exp > 0 and a * n0 + b * k0 + c < 0:
                raise ValueError(
                    f"factorial of negative integer {a * n0 + b * k0 + c} "
                    f"with positive exponent at (n={n0}, k={k0})"
                )
        num = den = 1
        for (a, b, c), exp in self.factors:
            v = a * n0 + b * k0 + c
            if v < 0:
                return Fraction(0)  # reciprocal factorial of a negative integer
            if exp > 0:
                num *= factorial(v) ** exp
            else:
                den *= factorial(v) ** (-exp)
        return self.prefactor.eval(n0, k0) * Fraction(num, den)

    def __str__(self):
        num_parts, den_parts = [], []
        pre = self.prefactor
        if pre.num != Poly.const(1):
            num_parts.append(_wrap_poly(pre.num))
        if pre.den != Poly.const(1):
            den_parts.append(_wrap_poly(pre.den))
        for arg, exp in self.factors:
            body = _render_fact(arg)
            if abs(exp) != 1:
                body += f"^{abs(exp)}"
            (num_parts if exp > 0 else den_parts).append(body)
        num = "*".join(num_parts) if num_parts else "1"
        if not den_parts:
            return num
        den = "*".join(den_parts)
        if len(den_parts) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"HyperTerm({self})"


def _render_fact(arg: LinearForm) -> str:
    a, b, c = arg
    if (a, b, c) in ((1, 0, 0), (0, 1, 0)):
        return f"{render_linear(arg)}!"
    return f"({render_linear(arg)})!"


def _wrap_poly(p: Poly) -> str:
    s = str(p)
    return s if _single_token(p) else f"({s})"


def _single_token(p: Poly) -> bool:
    items = list(p.items())
    if len(items) != 1:
        return False
    (dn, dk), c = items[0]
    if c != 1:
        return dn == dk == 0 and c > 0 and c.denominator == 1
    return (dn, dk) != (0, 0) and (dn == 0 or dk == 0)


def parse_term(text: str) -> HyperTerm:
    """Parse summand text like ``k*(n+k)!^2/(k!^4*(n-k)!^2)``."""
    value = parse_symvalue(text)
    if value.harmonics:
        raise ParseError("harmonic sums are not allowed in a hypergeometric term", 0)
    if value.rat.is_zero():
        raise ParseError("term is identically zero", 0)
    return HyperTerm(value.factors, value.rat)


def shift_quotient(t: HyperTerm, var: str) -> RatFunc:
    return t.shift_quotient(var)


def eval_term(t: HyperTerm, n0: int, k0: int) -> Fraction:
    return t.eval(n0, k0)
