"""Exact bivariate polynomials and rational functions in the variables n, k.

``Poly`` stores a sparse table mapping exponent pairs ``(deg_n, deg_k)`` to
``Fraction`` coefficients; zero coefficients are never stored, so structural
equality of tables is equality of polynomials.  ``RatFunc`` keeps a reduced
numerator/denominator pair with the denominator monic under the lexicographic
order n > k, which makes structural equality a valid zero-test for the whole
package: f == g iff num_f*den_g - num_g*den_f is the empty table.

Gcds are computed by the primitive-part Euclidean algorithm in k with content
gcds taken in n; degrees in this package stay small (tens), so no modular
methods are needed.
"""

from __future__ import annotations

import math
from fractions import Fraction

VARS = ("n", "k")


class PoleError(ZeroDivisionError):
    """Evaluation of a rational function at a zero of its denominator."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class Poly:
    """Polynomial in n and k over the rationals, as a sparse coefficient table."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: dict[tuple[int, int], Fraction] | None = None):
        table = {}
        if coeffs:
            for (dn, dk), c in coeffs.items():
                c = _as_fraction(c)
                if c:
                    table[(int(dn), int(dk))] = c
        self._c = table

    # -- constructors -------------------------------------------------------

    @staticmethod
    def const(value) -> "Poly":
        return Poly({(0, 0): _as_fraction(value)})

    @staticmethod
    def var(name: str) -> "Poly":
        if name == "n":
            return Poly({(1, 0): Fraction(1)})
        if name == "k":
            return Poly({(0, 1): Fraction(1)})
        raise ValueError(f"unknown variable {name!r} (only n, k)")

    @staticmethod
    def linear(a: int, b: int, c: int) -> "Poly":
        """The linear form a*n + b*k + c."""
        return Poly({(1, 0): Fraction(a), (0, 1): Fraction(b), (0, 0): Fraction(c)})

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._c

    def is_const(self) -> bool:
        return not self._c or self._c.keys() == {(0, 0)}

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self._c.get((0, 0), Fraction(0))

    def degree(self, var: str) -> int:
        """Degree in one variable; the zero polynomial has degree -1."""
        if not self._c:
            return -1
        pos = VARS.index(var)
        return max(e[pos] for e in self._c)

    def leading_key(self) -> tuple[int, int]:
        """Largest exponent pair under lex order n > k."""
        if not self._c:
            raise ValueError("zero polynomial has no leading term")
        return max(self._c)

    def leading_coeff(self) -> Fraction:
        return self._c[self.leading_key()]

    def items(self):
        return self._c.items()

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        table = dict(self._c)
        for e, c in other._c.items():
            s = table.get(e, Fraction(0)) + c
            if s:
                table[e] = s
            else:
                table.pop(e, None)
        out = Poly.__new__(Poly)
        out._c = table
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly.__new__(Poly)
        out._c = {e: -c for e, c in self._c.items()}
        return out

    def __sub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c0 = _as_fraction(other)
            if not c0:
                return Poly()
            out = Poly.__new__(Poly)
            out._c = {e: c * c0 for e, c in self._c.items()}
            return out
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        # integer fast path: plain int arithmetic beats Fraction by a wide margin
        if all(c.denominator == 1 for c in self._c.values()) and all(
            c.denominator == 1 for c in other._c.values()
        ):
            itable: dict[tuple[int, int], int] = {}
            a_items = [(e, c.numerator) for e, c in self._c.items()]
            b_items = [(e, c.numerator) for e, c in other._c.items()]
            for (an, ak), ac in a_items:
                for (bn, bk), bc in b_items:
                    e = (an + bn, ak + bk)
                    itable[e] = itable.get(e, 0) + ac * bc
            out = Poly.__new__(Poly)
            out._c = {e: Fraction(v) for e, v in itable.items() if v}
            return out
        table: dict[tuple[int, int], Fraction] = {}
        for (an, ak), ac in self._c.items():
            for (bn, bk), bc in other._c.items():
                e = (an + bn, ak + bk)
                s = table.get(e, Fraction(0)) + ac * bc
                if s:
                    table[e] = s
                else:
                    table.pop(e, None)
        out = Poly.__new__(Poly)
        out._c = table
        return out

    __rmul__ = __mul__

    def __pow__(self, m: int):
        if m < 0:
            raise ValueError("negative power of a Poly; use RatFunc")
        result = Poly.const(1)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def __eq__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    # -- structure -----------------------------------------------------------

    def shift(self, var: str, offset: int) -> "Poly":
        """Substitute var -> var + offset."""
        if offset == 0 or self.is_zero():
            return self
        pos = VARS.index(var)
        table: dict[tuple[int, int], Fraction] = {}
        for e, c in self._c.items():
            d = e[pos]
            for t in range(d + 1):
                coef = c * math.comb(d, t) * Fraction(offset) ** (d - t)
                ne = (t, e[1]) if pos == 0 else (e[0], t)
                s = table.get(ne, Fraction(0)) + coef
                if s:
                    table[ne] = s
                else:
                    table.pop(ne, None)
        out = Poly.__new__(Poly)
        out._c = table
        return out

    def subs(self, var: str, value) -> "Poly":
        """Substitute a rational value for one variable, leaving the other."""
        value = _as_fraction(value)
        pos = VARS.index(var)
        table: dict[tuple[int, int], Fraction] = {}
        for e, c in self._c.items():
            coef = c * value ** e[pos]
            ne = (0, e[1]) if pos == 0 else (e[0], 0)
            if coef:
                s = table.get(ne, Fraction(0)) + coef
                if s:
                    table[ne] = s
                else:
                    table.pop(ne, None)
        out = Poly.__new__(Poly)
        out._c = table
        return out

    def eval(self, n0, k0) -> Fraction:
        n0, k0 = _as_fraction(n0), _as_fraction(k0)
        total = Fraction(0)
        for (dn, dk), c in self._c.items():
            total += c * n0**dn * k0**dk
        return total

    def k_coefficients(self) -> list["Poly"]:
        """Coefficients of powers of k, each a polynomial in n (index = k-degree)."""
        dk = self.degree("k")
        out = [Poly() for _ in range(dk + 1)]
        for (en, ek), c in self._c.items():
            out[ek]._c[(en, 0)] = c
        return out

    def monic(self) -> "Poly":
        if self.is_zero():
            raise ValueError("cannot normalize the zero polynomial")
        lc = self.leading_coeff()
        return self * (1 / lc) if lc != 1 else self

    def clear_fractions(self) -> tuple["Poly", Fraction]:
        """Return (P, s) with P = s*self, P having coprime integer coefficients
        and positive leading coefficient."""
        if self.is_zero():
            return self, Fraction(1)
        den_lcm = 1
        for c in self._c.values():
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
        num_gcd = 0
        for c in self._c.values():
            num_gcd = math.gcd(num_gcd, c.numerator * (den_lcm // c.denominator))
        scale = Fraction(den_lcm, num_gcd)
        if self.leading_coeff() < 0:
            scale = -scale
        return self * scale, scale

    # -- rendering -----------------------------------------------------------

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c, reverse=True):
            c = self._c[e]
            mono = _render_monomial(e)
            if mono:
                if abs(c) == 1:
                    body = mono
                else:
                    body = f"{_render_coeff(abs(c))}*{mono}"
            else:
                body = _render_coeff(abs(c))
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"Poly({self})"


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"({c.numerator}/{c.denominator})"


def _render_monomial(e: tuple[int, int]) -> str:
    dn, dk = e
    parts = []
    if dn:
        parts.append("n" if dn == 1 else f"n^{dn}")
    if dk:
        parts.append("k" if dk == 1 else f"k^{dk}")
    return "*".join(parts)


def _coerce_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    return NotImplemented


ZERO = Poly()
ONE = Poly.const(1)


# ---------------------------------------------------------------------------
# gcd machinery: univariate primitive PRS over Z, lifted to two variables by
# treating k as the main variable with contents in Q[n].
# ---------------------------------------------------------------------------


def _uni_int_coeffs(p: Poly, var: str) -> list[int]:
    """Dense integer coefficient list (low to high) of a univariate poly,
    scaled to coprime integer coefficients."""
    q, _ = p.clear_fractions()
    pos = VARS.index(var)
    out = [0] * (q.degree(var) + 1)
    for e, c in q.items():
        out[e[pos]] = c.numerator
    return out


def _uni_from_int_coeffs(coeffs: list[int], var: str) -> Poly:
    pos = VARS.index(var)
    table = {}
    for d, c in enumerate(coeffs):
        if c:
            table[(d, 0) if pos == 0 else (0, d)] = Fraction(c)
    return Poly(table)


def _int_content(coeffs: list[int]) -> int:
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    return g


def _int_primitive(coeffs: list[int]) -> list[int]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return coeffs
    g = _int_content(coeffs)
    if coeffs[-1] < 0:
        g = -g
    return [c // g for c in coeffs]


def _int_prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of univariate integer polynomials (lists, low->high)."""
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(r) - 1 >= db and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        while r and r[-1] == 0:
            r.pop()
    return r


def _uni_gcd_int(a: list[int], b: list[int]) -> list[int]:
    a, b = _int_primitive(list(a)), _int_primitive(list(b))
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _int_prem(a, b)
        a, b = b, _int_primitive(r)
    return a


def _content_in_n(p: Poly) -> Poly:
    """Gcd over Q[n] of the coefficients of powers of k (primitive, int coeffs)."""
    coeffs = p.k_coefficients()
    acc: list[int] = []
    for c in coeffs:
        if c.is_zero():
            continue
        acc = _uni_gcd_int(acc, _uni_int_coeffs(c, "n")) if acc else _uni_int_coeffs(c, "n")
        if acc == [1]:
            break
    return _uni_from_int_coeffs(acc, "n")


def divexact(a: Poly, b: Poly) -> Poly:
    """Exact polynomial division a / b; raises if the division is not exact."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return ZERO
    if b.is_const():
        return a * (1 / b.const_value())
    if b.degree("k") == 0 and a.degree("k") > 0:
        # divide each k-coefficient by the n-only divisor
        out = Poly()
        for j, c in enumerate(a.k_coefficients()):
            if not c.is_zero():
                out = out + divexact(c, b) * Poly({(0, j): Fraction(1)})
        return out
    # long division in the main variable (k if present, else n)
    main = "k" if b.degree("k") > 0 else "n"
    db = b.degree(main)
    b_lead = _coeff_of_power(b, main, db)
    q = Poly()
    r = a
    while not r.is_zero() and r.degree(main) >= db:
        dr = r.degree(main)
        r_lead = _coeff_of_power(r, main, dr)
        factor = divexact(r_lead, b_lead) if not b_lead.is_const() else r_lead * (
            1 / b_lead.const_value()
        )
        mono = Poly({(0, dr - db): Fraction(1)}) if main == "k" else Poly(
            {(dr - db, 0): Fraction(1)}
        )
        term = factor * mono
        q = q + term
        r = r - term * b
        if not r.is_zero() and r.degree(main) == dr:
            raise ValueError("inexact polynomial division")
    if not r.is_zero():
        raise ValueError("inexact polynomial division")
    return q


def _coeff_of_power(p: Poly, var: str, d: int) -> Poly:
    pos = VARS.index(var)
    table = {}
    for e, c in p.items():
        if e[pos] == d:
            table[(e[0], 0) if pos == 1 else (0, e[1])] = c
    return Poly(table)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd of two polynomials; divides both exactly.

    Raises ValueError when both inputs are zero.
    """
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.degree("k") == 0 and b.degree("k") == 0:
        return _uni_from_int_coeffs(
            _uni_gcd_int(_uni_int_coeffs(a, "n"), _uni_int_coeffs(b, "n")), "n"
        ).monic()
    if a.degree("n") == 0 and b.degree("n") == 0:
        g = _uni_gcd_int(_uni_int_coeffs_k(a), _uni_int_coeffs_k(b))
        return _uni_from_int_coeffs_k(g).monic()
    ca, cb = _content_in_n(a), _content_in_n(b)
    pa, pb = divexact(a, ca), divexact(b, cb)
    cg = _uni_from_int_coeffs(
        _uni_gcd_int(_uni_int_coeffs(ca, "n"), _uni_int_coeffs(cb, "n")), "n"
    )
    # primitive PRS in k with coefficients in Q[n]
    if pa.degree("k") < pb.degree("k"):
        pa, pb = pb, pa
    while not pb.is_zero() and pb.degree("k") > 0:
        r = _prem_k(pa, pb)
        pa, pb = pb, _primitive_k(r)
    if not pb.is_zero():
        # nontrivial content-free remainder: primitive parts are coprime
        pg = ONE
    else:
        pg = pa
    return (cg * pg).monic()


def _uni_int_coeffs_k(p: Poly) -> list[int]:
    q, _ = p.clear_fractions()
    out = [0] * (q.degree("k") + 1)
    for e, c in q.items():
        out[e[1]] = c.numerator
    return out


def _uni_from_int_coeffs_k(coeffs: list[int]) -> Poly:
    return Poly({(0, d): Fraction(c) for d, c in enumerate(coeffs) if c})


def _prem_k(a: Poly, b: Poly) -> Poly:
    """Pseudo-remainder of a by b in the main variable k."""
    db = b.degree("k")
    lb = _coeff_of_power(b, "k", db)
    r = a
    while not r.is_zero() and r.degree("k") >= db:
        dr = r.degree("k")
        lr = _coeff_of_power(r, "k", dr)
        r = r * lb - b * (lr * Poly({(0, dr - db): Fraction(1)}))
        if not r.is_zero() and r.degree("k") == dr:
            raise AssertionError("pseudo-division failed to reduce degree")
    return r


def _primitive_k(p: Poly) -> Poly:
    if p.is_zero() or p.degree("k") == 0:
        # a k-free remainder ends the PRS; its exact value is irrelevant
        return p
    cont = _content_in_n(p)
    return divexact(p, cont)


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return ZERO
    return divexact(a * b, poly_gcd(a, b)).monic()


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RatFunc:
    """Normalized quotient of two ``Poly``: reduced, denominator monic (lex n > k)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, RatFunc):
            if den is not None:
                raise TypeError("RatFunc(num, den) expects Poly arguments")
            self.num, self.den = num.num, num.den
            return
        num = _coerce_poly(num)
        den = ONE if den is None else _coerce_poly(den)
        if den is NotImplemented or num is NotImplemented:
            raise TypeError("RatFunc expects Poly, int or Fraction arguments")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in RatFunc")
        if num.is_zero():
            self.num, self.den = ZERO, ONE
            return
        g = poly_gcd(num, den)
        if not (g.is_const() and g.const_value() == 1):
            num, den = divexact(num, g), divexact(den, g)
        lc = den.leading_coeff()
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        self.num, self.den = num, den

    @staticmethod
    def const(value) -> "RatFunc":
        return RatFunc(Poly.const(value))

    @staticmethod
    def var(name: str) -> "RatFunc":
        return RatFunc(Poly.var(name))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        return self.num.const_value() / self.den.const_value()

    def __add__(self, other):
        other = _coerce_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = RatFunc.__new__(RatFunc)
        out.num, out.den = -self.num, self.den
        return out

    def __sub__(self, other):
        other = _coerce_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_ratfunc(other) - self

    def __mul__(self, other):
        other = _coerce_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero RatFunc")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce_ratfunc(other) / self

    def __pow__(self, m: int):
        if m == 0:
            return RatFunc.const(1)
        if m < 0:
            return (RatFunc.const(1) / self) ** (-m)
        return RatFunc(self.num**m, self.den**m)

    def __eq__(self, other):
        other = _coerce_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        # canonical forms make this structural; cross-multiplication would be
        # equivalent but slower
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def shift(self, var: str, offset: int) -> "RatFunc":
        out = RatFunc.__new__(RatFunc)
        out.num, out.den = self.num.shift(var, offset), self.den.shift(var, offset)
        return out

    def eval(self, n0, k0) -> Fraction:
        d = self.den.eval(n0, k0)
        if d == 0:
            raise PoleError(f"denominator {self.den} vanishes at (n={n0}, k={k0})")
        return self.num.eval(n0, k0) / d

    def __str__(self):
        # display form: numerator and denominator jointly scaled to coprime
        # integer coefficients, denominator's leading coefficient positive
        den_lcm = 1
        for c in list(self.num._c.values()) + list(self.den._c.values()):
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
        num, den = self.num * den_lcm, self.den * den_lcm
        g = math.gcd(
            _int_content([c.numerator for c in num._c.values()] or [0]),
            _int_content([c.numerator for c in den._c.values()]),
        )
        if g > 1:
            num, den = num * Fraction(1, g), den * Fraction(1, g)
        if den.leading_coeff() < 0:
            num, den = -num, -den
        if den == ONE:
            return str(num)
        num_s = str(num) if len(num._c) == 1 and num.leading_coeff() > 0 else f"({num})"
        den_s = str(den) if _is_atom(den) else f"({den})"
        return f"{num_s}/{den_s}"

    def __repr__(self):
        return f"RatFunc({self})"


def _is_atom(p: Poly) -> bool:
    """True when str(p) can stand unparenthesized after a '/'."""
    if len(p._c) != 1:
        return False
    (dn, dk), c = next(iter(p._c.items()))
    if dn == dk == 0:
        return c > 0 and c.denominator == 1
    return c == 1 and (dn == 0 or dk == 0)


def _coerce_ratfunc(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    if isinstance(x, (int, Fraction)):
        return RatFunc(Poly.const(x))
    return NotImplemented


RF_ZERO = RatFunc(ZERO)
RF_ONE = RatFunc(ONE)


def shift_var(obj, var: str, offset: int):
    """Substitute var -> var + offset in a Poly or RatFunc."""
    if var not in VARS:
        raise ValueError(f"unknown variable {var!r}")
    return obj.shift(var, offset)


def eval_ratfunc(f: RatFunc, n0, k0) -> Fraction:
    """Exact value of f at a rational point; PoleError when the denominator vanishes."""
    return f.eval(n0, k0)
