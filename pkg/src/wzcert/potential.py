"""WZ potential functions: rational combinations of harmonic numbers with
integer-linear arguments, plus a rational-function part.

A unit shift of n or k moves each harmonic argument by at most one (argument
coefficients are restricted to -1, 0, +1), so the finite differences
c(n, k+1) - c(n, k) and c(n+1, k) - c(n, k) collapse to plain rational
functions via H_{m+1} - H_m = 1/(m+1).  Those two differences are the WZ
pair carried through the telescoping machinery.
"""

from __future__ import annotations

from fractions import Fraction

from .numeric import harmonic
from .parsing import LinearForm, ParseError, parse_symvalue, render_linear
from .poly import Poly, RatFunc, RF_ZERO

__all__ = ["Potential", "parse_potential", "beukers_potential", "eval_potential", "delta"]


class Potential:
    """sum of coef * H(a*n + b*k + c) plus a rational-function part."""

    __slots__ = ("hterms", "ratpart")

    def __init__(self, hterms, ratpart=RF_ZERO):
        merged: dict[LinearForm, Fraction] = {}
        items = hterms.items() if isinstance(hterms, dict) else hterms
        for arg, coef in items:
            arg = (int(arg[0]), int(arg[1]), int(arg[2]))
            if abs(arg[0]) > 1 or abs(arg[1]) > 1:
                raise ValueError(
                    f"harmonic argument {render_linear(arg)} has a variable "
                    "coefficient outside -1..1; unit shifts would skip values"
                )
            c = merged.get(arg, Fraction(0)) + Fraction(coef)
            if c:
                merged[arg] = c
            else:
                merged.pop(arg, None)
        self.hterms: tuple[tuple[LinearForm, Fraction], ...] = tuple(
            sorted(merged.items(), key=lambda it: it[0], reverse=True)
        )
        self.ratpart = ratpart if isinstance(ratpart, RatFunc) else RatFunc(ratpart)

    def __eq__(self, other):
        if not isinstance(other, Potential):
            return NotImplemented
        return self.hterms == other.hterms and self.ratpart == other.ratpart

    def __hash__(self):
        return hash((self.hterms, self.ratpart))

    def eval(self, n0: int, k0: int) -> Fraction:
        total = self.ratpart.eval(n0, k0) if not self.ratpart.is_zero() else Fraction(0)
        for (a, b, c), coef in self.hterms:
            m = a * n0 + b * k0 + c
            if m < 0:
                raise ValueError(
                    f"harmonic number with negative index {m} at (n={n0}, k={k0})"
                )
            total += coef * harmonic(m)
        return total

    def delta(self, var: str) -> RatFunc:
        """c(shifted) - c as a rational function (one unit fraction per term)."""
        pos = {"n": 0, "k": 1}[var]
        diff = RF_ZERO
        for (a, b, c), coef in self.hterms:
            step = (a, b)[pos]
            if step == 1:
                diff = diff + RatFunc(Poly.const(coef), Poly.linear(a, b, c + 1))
            elif step == -1:
                diff = diff - RatFunc(Poly.const(coef), Poly.linear(a, b, c))
        if not self.ratpart.is_zero():
            diff = diff + self.ratpart.shift(var, 1) - self.ratpart
        return diff

    def __str__(self):
        parts = []
        if not self.ratpart.is_zero():
            parts.append(str(self.ratpart))
        for arg, coef in self.hterms:
            body = f"H({render_linear(arg)})"
            if abs(coef) != 1:
                cs = (
                    str(abs(coef))
                    if abs(coef).denominator == 1
                    else f"({abs(coef)})"
                )
                body = f"{cs}*{body}"
            if not parts:
                parts.append(body if coef > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coef > 0 else f"- {body}")
        return " ".join(parts) if parts else "0"

    def __repr__(self):
        return f"Potential({self})"


def beukers_potential() -> Potential:
    """The harmonic-sum weight 1/(2k) + H(n+k) + H(n-k) - 2H(k) whose
    hypergeometric-weighted sum vanishes identically."""
    return Potential(
        [((1, 1, 0), 1), ((1, -1, 0), 1), ((0, 1, 0), -2)],
        RatFunc(Poly.const(1), 2 * Poly.var("k")),
    )


def parse_potential(text: str) -> Potential:
    """Parse potential text like ``1/(2*k) + H(n+k) + H(n-k) - 2*H(k)``."""
    value = parse_symvalue(text)
    if value.factors:
        raise ParseError("factorials are not allowed in a potential", 0)
    return Potential(value.harmonics, value.rat)


def eval_potential(c: Potential, n0: int, k0: int) -> Fraction:
    return c.eval(n0, k0)


def delta(c: Potential, var: str) -> RatFunc:
    return c.delta(var)
