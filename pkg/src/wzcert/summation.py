"""Creative telescoping: Gosper's algorithm, Zeilberger's algorithm, its
extension to hypergeometric terms multiplied by a WZ potential, recurrence
guessing from exact values, and independent certificate verification.

Conventions.  A recurrence is sum_j sigma_j(n) * u(n+j) = 0 with polynomial
coefficients sigma_0..sigma_r in n.  A pure certificate R1 encodes
G(n,k) = R1(n,k) * t(n,k) with

    sum_j sigma_j(n) t(n+j,k) = G(n,k+1) - G(n,k);

a potential certificate (R1, R2) encodes G = t * (R1*c + R2) for the summand
t*c, where the unit shifts of the potential c are c plus a rational function
(its finite differences).  Dividing such an identity by t(n,k) turns it into
a statement about rational functions only, which is how both the solvers and
the verifier work.

Internally, everything a solver touches keeps its denominator as a multiset
of factors (the linear forms coming from factorial ratios and harmonic
differences).  Common denominators are then exponent maxima and clearing is
pure multiplication, so no gcd is ever taken on the large products; rational
normalization happens only once, on the final certificate.  Linear systems
are cleared to polynomial rows over Q[n] and reduced by cross-multiplication
elimination with content stripping.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .hyperterm import HyperTerm
from .parsing import parse_ratfunc
from .poly import (
    ONE,
    Poly,
    RatFunc,
    RF_ONE,
    RF_ZERO,
    PoleError,
    divexact,
    poly_gcd,
    shift_var,
)
from .potential import Potential

__all__ = [
    "Recurrence",
    "Certificate",
    "RecurrenceNotFound",
    "gosper",
    "zeilberger",
    "zeilberger_potential",
    "verify_certificate",
    "guess_recurrence",
    "apply_recurrence",
    "recurrence_to_json",
    "recurrence_from_json",
]


class RecurrenceNotFound(RuntimeError):
    """No telescoping recurrence within the allowed order/degree bounds."""

    def __init__(self, message: str, orders_tried):
        super().__init__(message)
        self.orders_tried = list(orders_tried)


@dataclass(frozen=True)
class Recurrence:
    """sum_j coeffs[j](n) * u(n+j) = 0, with coeffs[-1] nonzero."""

    coeffs: tuple[Poly, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1].is_zero():
            raise ValueError("leading recurrence coefficient must be nonzero")
        for c in self.coeffs:
            if c.degree("k") > 0:
                raise ValueError("recurrence coefficients must not involve k")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self):
        parts = []
        for j, c in enumerate(self.coeffs):
            if not c.is_zero():
                parts.append(f"({c})*u(n+{j})" if j else f"({c})*u(n)")
        return " + ".join(parts) + " = 0"


@dataclass(frozen=True)
class Certificate:
    """Telescoping certificate: G = R1*t (pure) or G = t*(R1*c + R2) (potential)."""

    kind: str  # "pure" | "potential"
    r1: RatFunc
    r2: RatFunc | None = None

    def __post_init__(self):
        if self.kind not in ("pure", "potential"):
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if (self.kind == "potential") != (self.r2 is not None):
            raise ValueError("R2 is present exactly for potential certificates")


# ---------------------------------------------------------------------------
# rational functions with factored denominators (solver-internal)
# ---------------------------------------------------------------------------


class _Fact:
    """num / prod(den), with the denominator kept as a factor multiset.

    Addition takes exponent maxima instead of lcm-by-gcd, so the heavy
    products arising in telescoping systems never hit polynomial gcd.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: dict[Poly, int] | None = None):
        self.num = num
        self.den = {} if num.is_zero() else dict(den or {})

    @staticmethod
    def from_ratfunc(f: RatFunc) -> "_Fact":
        den = {} if f.den == ONE else {f.den: 1}
        return _Fact(f.num, den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __mul__(self, other):
        if isinstance(other, _Fact):
            if self.is_zero() or other.is_zero():
                return _FACT_ZERO
            den = dict(self.den)
            for a, e in other.den.items():
                den[a] = den.get(a, 0) + e
            return _Fact(self.num * other.num, den)
        return _Fact(self.num * other, self.den)

    def __neg__(self):
        return _Fact(-self.num, self.den)

    def __add__(self, other: "_Fact") -> "_Fact":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        common = dict(self.den)
        for a, e in other.den.items():
            if common.get(a, 0) < e:
                common[a] = e
        num = self.num * _complement(common, self.den) + other.num * _complement(
            common, other.den
        )
        return _Fact(num, common)

    def __sub__(self, other: "_Fact") -> "_Fact":
        return self + (-other)

    def shift(self, var: str, offset: int) -> "_Fact":
        if offset == 0:
            return self
        den = {}
        for a, e in self.den.items():
            s = a.shift(var, offset)
            den[s] = den.get(s, 0) + e
        return _Fact(self.num.shift(var, offset), den)

    def reduced(self) -> "_Fact":
        """Cancel small denominator atoms that divide the numerator exactly."""
        if self.is_zero():
            return self
        num = self.num
        den = dict(self.den)
        for atom in list(den):
            if len(list(atom.items())) > 3:
                continue
            while den.get(atom, 0) > 0:
                try:
                    num = divexact(num, atom)
                except ValueError:
                    break
                den[atom] -= 1
                if den[atom] == 0:
                    del den[atom]
        return _Fact(num, den)

    def to_ratfunc(self) -> RatFunc:
        return RatFunc(self.num, _product(self.den))

    def den_product(self) -> Poly:
        return _product(self.den)


_FACT_ZERO = _Fact(Poly())


def _complement(common: dict[Poly, int], den: dict[Poly, int]) -> Poly:
    out = ONE
    for atom, e in common.items():
        extra = e - den.get(atom, 0)
        for _ in range(extra):
            out = out * atom
    return out


def _product(atoms: dict[Poly, int]) -> Poly:
    out = ONE
    for atom, e in atoms.items():
        for _ in range(e):
            out = out * atom
    return out


def _merge_max(*dicts: dict[Poly, int]) -> dict[Poly, int]:
    out: dict[Poly, int] = {}
    for d in dicts:
        for a, e in d.items():
            if out.get(a, 0) < e:
                out[a] = e
    return out


def _factored_shift_ratio(t: HyperTerm, var: str) -> _Fact:
    """t(var+1)/t(var) with the denominator kept factored into linear forms."""
    pos = {"n": 0, "k": 1}[var]
    num = ONE
    den: dict[Poly, int] = {}
    for (a, b, c), exp in t.factors:
        step = (a, b)[pos]
        if step == 0:
            continue
        blocks = (
            [Poly.linear(a, b, c + i) for i in range(1, step + 1)]
            if step > 0
            else [Poly.linear(a, b, c - i) for i in range(0, -step)]
        )
        e = exp if step > 0 else -exp
        for block in blocks:
            if e > 0:
                for _ in range(e):
                    num = num * block
            else:
                den[block] = den.get(block, 0) - e
    pre = t.prefactor
    pre_next = shift_var(pre, var, 1)
    num = num * pre_next.num
    if pre.den != ONE:
        num = num * pre.den
    for blob in (pre.num, pre_next.den):
        if blob != ONE:
            den[blob] = den.get(blob, 0) + 1
    return _Fact(num, den).reduced()


def _factored_rhos(t: HyperTerm, r: int) -> list[_Fact]:
    """rho_j = t(n+j,k)/t(n,k) for j = 0..r, denominators factored."""
    rn = _factored_shift_ratio(t, "n")
    rhos = [_Fact(ONE)]
    for j in range(1, r + 1):
        rhos.append((rhos[-1] * rn.shift("n", j - 1)).reduced())
    return rhos


def _factored_delta(c: Potential, var: str) -> _Fact:
    """c(var+1) - c(var) as a factored rational function."""
    pos = {"n": 0, "k": 1}[var]
    total = _FACT_ZERO
    for (a, b, cc), coef in c.hterms:
        step = (a, b)[pos]
        if step == 1:
            total = total + _Fact(Poly.const(coef), {Poly.linear(a, b, cc + 1): 1})
        elif step == -1:
            total = total - _Fact(Poly.const(coef), {Poly.linear(a, b, cc): 1})
    if not c.ratpart.is_zero():
        total = total + _Fact.from_ratfunc(shift_var(c.ratpart, var, 1))
        total = total - _Fact.from_ratfunc(c.ratpart)
    return total


# ---------------------------------------------------------------------------
# exact linear algebra over Q(n)
# ---------------------------------------------------------------------------


def _strip_row(row: list[Poly]) -> None:
    """Scale a row of polynomials to coprime integer coefficients and divide
    out any common polynomial factor (controls growth during elimination)."""
    nonzero = [e for e in row if not e.is_zero()]
    if not nonzero:
        return
    g = nonzero[0]
    for e in nonzero[1:]:
        g = poly_gcd(g, e)
        if g.is_const():
            break
    if not g.is_const():
        for i, e in enumerate(row):
            if not e.is_zero():
                row[i] = divexact(e, g)
        nonzero = [e for e in row if not e.is_zero()]
    den_lcm = 1
    num_gcd = 0
    for e in nonzero:
        for _, c in e.items():
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    for e in nonzero:
        for _, c in e.items():
            num_gcd = math.gcd(num_gcd, c.numerator * (den_lcm // c.denominator))
    scale = Fraction(den_lcm, num_gcd)
    if scale != 1:
        for i, e in enumerate(row):
            if not e.is_zero():
                row[i] = e * scale


def _poly_nullspace(rows: list[list[Poly]]) -> list[list[RatFunc]]:
    """Basis of the nullspace of a matrix of polynomials in n, over Q(n).

    Gauss-Jordan elimination with cross-multiplication; each basis vector has
    one free column set to 1 and the remaining free columns set to 0.
    """
    if not rows:
        return []
    ncols = len(rows[0])
    mat = [list(r) for r in rows if any(not e.is_zero() for e in r)]
    for r in mat:
        _strip_row(r)
    used = [False] * len(mat)
    pivots: list[tuple[int, int]] = []
    for col in range(ncols):
        best = None
        for i, r in enumerate(mat):
            if used[i] or r[col].is_zero():
                continue
            key = (r[col].degree("n"), len(list(r[col].items())))
            if best is None or key < best[0]:
                best = (key, i)
        if best is None:
            continue
        pi = best[1]
        used[pi] = True
        pivots.append((pi, col))
        piv = mat[pi][col]
        for i, r in enumerate(mat):
            if i == pi or r[col].is_zero():
                continue
            g = poly_gcd(piv, r[col])
            m_r = divexact(piv, g)
            m_p = divexact(r[col], g)
            prow = mat[pi]
            for j in range(ncols):
                r[j] = r[j] * m_r - prow[j] * m_p
            _strip_row(r)
    pivot_cols = {c for _, c in pivots}
    basis = []
    for fc in range(ncols):
        if fc in pivot_cols:
            continue
        vec = [RF_ZERO] * ncols
        vec[fc] = RF_ONE
        for pi, c in pivots:
            entry = mat[pi][fc]
            if not entry.is_zero():
                vec[c] = RatFunc(-entry, mat[pi][c])
        basis.append(vec)
    return basis


def _fraction_nullspace(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Nullspace basis of an exact rational matrix (same conventions)."""
    if not rows:
        return []
    ncols = len(rows[0])
    mat = [list(r) for r in rows if any(r)]
    used = [False] * len(mat)
    pivots: list[tuple[int, int]] = []
    for col in range(ncols):
        pi = next((i for i, r in enumerate(mat) if not used[i] and r[col]), None)
        if pi is None:
            continue
        used[pi] = True
        pivots.append((pi, col))
        piv = mat[pi][col]
        for i, r in enumerate(mat):
            if i != pi and r[col]:
                f = r[col] / piv
                for j in range(ncols):
                    r[j] -= f * mat[pi][j]
    pivot_cols = {c for _, c in pivots}
    basis = []
    for fc in range(ncols):
        if fc in pivot_cols:
            continue
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for pi, c in pivots:
            if mat[pi][fc]:
                vec[c] = -mat[pi][fc] / mat[pi][c]
        basis.append(vec)
    return basis


def _clear_vector(vec: list[RatFunc]) -> list[Poly]:
    """Scale a vector over Q(n) by the lcm of its denominators, to polynomials."""
    den = ONE
    for f in vec:
        if f.den != ONE:
            g = poly_gcd(den, f.den)
            den = divexact(den * f.den, g)
    out = []
    for f in vec:
        cleared = f * RatFunc(den)
        if cleared.den != ONE:
            raise AssertionError("vector clearing failed")
        out.append(cleared.num)
    return out


# ---------------------------------------------------------------------------
# Gosper's algorithm
# ---------------------------------------------------------------------------


def _dispersion_candidates(a: Poly, b: Poly) -> list[int]:
    """Nonnegative integers h for which gcd(a(k), b(k+h)) might be nontrivial.

    Computed on specializations of n: a genuine common factor survives
    specialization except at finitely many n, so the union over a couple of
    evaluation points is a superset of the true dispersion set (spurious
    candidates are discarded later by an exact bivariate gcd).
    """
    candidates: set[int] = set()
    if a.degree("k") == 0 or b.degree("k") == 0:
        return []
    points = (Fraction(17), Fraction(59), Fraction(101))
    got = 0
    for n0 in points:
        fa, fb = a.subs("n", n0), b.subs("n", n0)
        if fa.degree("k") != a.degree("k") or fb.degree("k") != b.degree("k"):
            continue  # degenerate point, leading coefficient vanished
        got += 1
        bound = _root_bound(fa) + _root_bound(fb)
        for h in range(0, bound + 1):
            g = poly_gcd(fa, fb.shift("k", h))
            if g.degree("k") > 0:
                candidates.add(h)
        if got == 2:
            break
    return sorted(candidates)


def _nth_root_ceil(x: Fraction, i: int) -> int:
    """Smallest integer >= x**(1/i) for x >= 0."""
    target = -(-x.numerator // x.denominator)  # ceil(x)
    if target <= 1:
        return target
    lo, hi = 0, 1
    while hi**i < target:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**i >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _root_bound(p: Poly) -> int:
    """Fujiwara bound on the absolute value of the roots of a univariate poly in k."""
    coeffs = p.k_coefficients()
    d = len(coeffs) - 1
    lead = coeffs[-1].const_value()
    best = 0
    for i in range(1, d + 1):
        c = coeffs[d - i]
        if c.is_zero():
            continue
        v = abs(c.const_value() / lead)
        if i == d:
            v = v / 2
        best = max(best, _nth_root_ceil(v, i))
    return 2 * best + 1


def _gosper_normal(a: Poly, b: Poly):
    """Decompose a/b = (A(k)/B(k)) * (C(k+1)/C(k)) with gcd(A(k), B(k+h)) = 1
    for all integers h >= 0.  C is returned expanded and as a factor multiset."""
    A, B = a, b
    c_atoms: dict[Poly, int] = {}
    for h in _dispersion_candidates(A, B):
        g = poly_gcd(A, B.shift("k", h))
        if g.degree("k") <= 0:
            continue
        A = divexact(A, g)
        B = divexact(B, g.shift("k", -h))
        for j in range(1, h + 1):
            atom = g.shift("k", -j)
            c_atoms[atom] = c_atoms.get(atom, 0) + 1
    return A, B, _product(c_atoms), c_atoms


def _coeff_in_k(p: Poly, d: int) -> Poly:
    table = {}
    for (en, ek), c in p.items():
        if ek == d:
            table[(en, 0)] = c
    return Poly(table)


def _x_degree_bound(A: Poly, B1: Poly, K: int) -> int:
    """Degree bound for the polynomial unknown in the Gosper equation
    A(k) x(k+1) - B1(k) x(k) = rhs, with deg_k rhs <= K.

    Union of the classical case analysis; -1 means provably no solution.
    """
    N, M = A.degree("k"), B1.degree("k")
    candidates = {K - max(N, M)}
    if N == M and _coeff_in_k(A, N) == _coeff_in_k(B1, M):
        candidates.add(K - N + 1)
        if N == 0:
            candidates.add(0)
        else:
            lead = _coeff_in_k(A, N)
            diff = _coeff_in_k(B1, N - 1) - _coeff_in_k(A, N - 1)
            if diff.is_zero():
                candidates.add(0)
            else:
                try:
                    q = divexact(diff, lead)
                except ValueError:
                    q = None
                if q is not None and q.is_const():
                    u = q.const_value()
                    if u.denominator == 1:
                        candidates.add(int(u))
    valid = [d for d in candidates if d >= 0]
    return max(valid) if valid else -1


def _match_k_powers(cols: list[Poly]) -> list[list[Poly]]:
    """Rows of the linear system: one per power of k, entries polys in n."""
    deg = max((c.degree("k") for c in cols if not c.is_zero()), default=0)
    rows = []
    for dk in range(deg + 1):
        rows.append([_coeff_in_k(c, dk) for c in cols])
    return rows


def gosper(r: RatFunc) -> RatFunc | None:
    """Gosper's algorithm on the shift quotient r(k) = t(k+1)/t(k).

    Returns R with S = R*t satisfying S(k+1) - S(k) = t(k) when t has a
    hypergeometric antidifference, else None.  Equivalently R satisfies
    R(k+1)*r(k) - R(k) = 1.
    """
    A, B, C, _ = _gosper_normal(r.num, r.den)
    B1 = B.shift("k", -1)
    d = _x_degree_bound(A, B1, C.degree("k"))
    if d < 0:
        return None
    # homogeneous system in (x_0..x_d, z): A x(k+1) - B1 x(k) - z*C = 0
    cols: list[Poly] = []
    k = Poly.var("k")
    for i in range(d + 1):
        cols.append(A * (k + 1) ** i - B1 * k**i)
    cols.append(-C)
    basis = _poly_nullspace(_match_k_powers(cols))
    z = len(cols) - 1
    pick = next((vec for vec in basis if not vec[z].is_zero()), None)
    if pick is None:
        return None
    scale = pick[z]
    x = RF_ZERO
    for i in range(d + 1):
        x = x + (pick[i] / scale) * RatFunc(Poly({(0, i): Fraction(1)}))
    if x.is_zero():
        return None
    return x * RatFunc(B1, C)


# ---------------------------------------------------------------------------
# Zeilberger's algorithm (pure and potential-extended)
# ---------------------------------------------------------------------------


@dataclass
class _Setup:
    """Order-r telescoping data shared by the pure and potential solvers."""

    cols: list[Poly]  # eq-(i) columns: sigma_0..sigma_r then x_0..x_d
    d: int
    A: Poly
    B1: Poly
    C: Poly
    c_atoms: dict[Poly, int]
    d_atoms: dict[Poly, int]
    rt: _Fact
    rhos: list[_Fact]
    numerators: list[Poly]  # N_j = rho_j * D


def _term_setup(t: HyperTerm, r: int, extra: int) -> _Setup | None:
    rhos = _factored_rhos(t, r)
    d_atoms = _merge_max(*(rho.den for rho in rhos))
    numerators = [rho.num * _complement(d_atoms, rho.den) for rho in rhos]
    rt = _factored_shift_ratio(t, "k")
    d_shifted = {a.shift("k", 1): e for a, e in d_atoms.items()}
    rw_den = dict(rt.den)
    for a, e in d_shifted.items():
        rw_den[a] = rw_den.get(a, 0) + e
    rw = RatFunc(rt.num * _product(d_atoms), _product(rw_den))
    A, B, C, c_atoms = _gosper_normal(rw.num, rw.den)
    B1 = B.shift("k", -1)
    K = C.degree("k") + max(nj.degree("k") for nj in numerators)
    d = _x_degree_bound(A, B1, K)
    if d < 0 and extra == 0:
        return None
    d = max(d, -1) + extra
    if d < 0:
        return None
    cols: list[Poly] = [-C * nj for nj in numerators]
    k = Poly.var("k")
    for i in range(d + 1):
        cols.append(A * (k + 1) ** i - B1 * k**i)
    return _Setup(cols, d, A, B1, C, c_atoms, d_atoms, rt, rhos, numerators)


def _assemble_recurrence(sigmas: list[RatFunc], extras: list[RatFunc]):
    """Clear denominators and content so the sigma_j are coprime integer
    polynomials; scale the certificate pieces identically."""
    den = ONE
    for s in sigmas:
        if s.den != ONE:
            g = poly_gcd(den, s.den)
            den = divexact(den * s.den, g)
    scale = RatFunc(den)
    polys = []
    for s in sigmas:
        cleared = s * scale
        if cleared.den != ONE:
            raise AssertionError("denominator clearing failed")
        polys.append(cleared.num)
    content = None
    for p in polys:
        if p.is_zero():
            continue
        content = p if content is None else poly_gcd(content, p)
        if content.is_const():
            break
    if content is not None and not content.is_const():
        polys = [divexact(p, content) if not p.is_zero() else p for p in polys]
        scale = scale / RatFunc(content)
    # joint integer normalization, leading coefficient of sigma_r positive
    den_lcm = 1
    num_gcd = 0
    for p in polys:
        for _, c in p.items():
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    for p in polys:
        for _, c in p.items():
            num_gcd = math.gcd(num_gcd, c.numerator * (den_lcm // c.denominator))
    s = Fraction(den_lcm, num_gcd)
    if polys[-1].leading_coeff() * s < 0:
        s = -s
    polys = [p * s for p in polys]
    scale = scale * s
    return Recurrence(tuple(polys)), [e * scale for e in extras]


def _pick_sigma_vector(basis, r):
    """Deterministically select a nullspace vector whose sigma block is nonzero,
    preferring a nonzero leading coefficient sigma_r."""
    best = None
    for vec in basis:
        sig = vec[: r + 1]
        if all(s.is_zero() for s in sig):
            continue
        if not sig[r].is_zero():
            return vec
        if best is None:
            best = vec
    return best


def zeilberger(t: HyperTerm, max_order: int) -> tuple[Recurrence, Certificate]:
    """Creative telescoping for a proper hypergeometric term.

    Finds the least order r <= max_order with polynomials sigma_j(n) and a
    rational certificate R1 such that
    sum_j sigma_j(n) t(n+j,k) = G(n,k+1) - G(n,k) with G = R1*t.
    """
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    tried = []
    for r in range(1, max_order + 1):
        for extra in (0, 2, 4):
            setup = _term_setup(t, r, extra)
            if setup is None:
                continue
            basis = _poly_nullspace(_match_k_powers(setup.cols))
            pick = _pick_sigma_vector(basis, r)
            if pick is None:
                continue
            # rescale sigma and x jointly to polynomial entries
            cleared = _clear_vector(pick)
            sigmas = [RatFunc(p) for p in cleared[: r + 1]]
            x = _combine_poly_coeffs(cleared[r + 1 :])
            r1_den = _product(_merge_max(setup.c_atoms, setup.d_atoms))
            r1 = RatFunc(x * setup.B1, r1_den)
            rec, (r1,) = _assemble_recurrence(sigmas, [r1])
            cert = Certificate("pure", r1)
            if verify_certificate(t, None, rec, cert):
                return rec, cert
        tried.append(r)
    raise RecurrenceNotFound(
        f"no telescoping recurrence of order <= {max_order}", tried
    )


def _combine_poly_coeffs(coeffs: list[Poly]) -> Poly:
    x = Poly()
    for i, c in enumerate(coeffs):
        if not c.is_zero():
            x = x + c * Poly({(0, i): Fraction(1)})
    return x


def zeilberger_potential(
    t: HyperTerm, c: Potential, max_order: int
) -> tuple[Recurrence, Certificate]:
    """Creative telescoping for a summand t(n,k) * c(n,k) with c a WZ potential.

    Searches for sigma_j(n) and rational R1, R2 such that with
    G = t*(R1*c + R2),

        sum_j sigma_j(n) t(n+j,k) c(n+j,k) = G(n,k+1) - G(n,k).

    Writing c(n+j,k) = c + g_j and c(n,k+1) = c + f (rational g_j, f), both
    sides live in the module spanned by {t*c, t}; matching the coefficients
    of c and of 1 gives two coupled linear problems over Q(n) which are
    solved simultaneously: the sigma block must satisfy the pure telescoping
    equation, and the combination of its solutions must make the remaining
    inhomogeneity Gosper-summable against R2.
    """
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    f_fact = _factored_delta(c, "k")
    g_fact = _factored_delta(c, "n")
    tried = []
    for r in range(1, max_order + 1):
        g_steps = [_FACT_ZERO]
        for j in range(1, r + 1):
            g_steps.append(g_steps[-1] + g_fact.shift("n", j - 1))
        for extra in (0, 2, 4):
            setup = _term_setup(t, r, extra)
            if setup is None:
                continue
            basis = _poly_nullspace(_match_k_powers(setup.cols))
            if not basis:
                continue
            sols = []
            for vec in basis:
                cleared = _clear_vector(vec)
                sols.append((cleared[: r + 1], _combine_poly_coeffs(cleared[r + 1 :])))
            found = _solve_potential_layer(sols, setup, f_fact, g_steps, extra)
            if found is None:
                continue
            sigmas, r1, r2 = found
            rec, (r1, r2) = _assemble_recurrence(sigmas, [r1, r2])
            cert = Certificate("potential", r1, r2)
            if verify_certificate(t, c, rec, cert):
                return rec, cert
        tried.append(r)
    raise RecurrenceNotFound(
        f"no potential telescoping recurrence of order <= {max_order}", tried
    )


def _solve_potential_layer(sols, setup: _Setup, f_fact: _Fact, g_steps, extra: int):
    """Second stage of the potential solve.

    Each eq-(i) solution m contributes the inhomogeneity
        E_m = rt * R1_m(k+1) * f - sum_j sigma_{m,j} rho_j g_j,
    and we need alpha_m, R2 = x2(k)/W2 with
        sum_m alpha_m E_m + rt*R2(k+1) - R2 = 0.
    """
    rt = setup.rt
    r1_den = _merge_max(setup.c_atoms, setup.d_atoms)
    r1_den_next = {a.shift("k", 1): e for a, e in r1_den.items()}
    known: list[_Fact] = []
    for sigmas, x_m in sols:
        r1_next = _Fact((x_m * setup.B1).shift("k", 1), r1_den_next)
        e = rt * r1_next * f_fact
        for j, s in enumerate(sigmas):
            if not s.is_zero():
                rho_j = _Fact(setup.numerators[j], setup.d_atoms)
                e = e - _Fact(s) * rho_j * g_steps[j]
        known.append(e.reduced())
    w2_atoms = _merge_max(rt.den, *(e.den for e in known))
    if extra >= 2:
        w2_atoms = _merge_max(
            w2_atoms, {a.shift("k", -1): e for a, e in w2_atoms.items()}
        )
    if extra >= 4:
        w2_atoms = _merge_max(
            w2_atoms, {a.shift("k", 1): e for a, e in w2_atoms.items()}
        )
    w2_next = {a.shift("k", 1): e for a, e in w2_atoms.items()}
    d2 = (
        sum(e * a.degree("k") for a, e in w2_atoms.items())
        + rt.num.degree("k")
        + 2
        + extra
    )
    terms: list[_Fact] = list(known)
    k = Poly.var("k")
    for i in range(d2 + 1):
        plus = rt * _Fact((k + 1) ** i, w2_next)
        minus = _Fact(k**i, w2_atoms)
        terms.append(plus - minus)
    common = _merge_max(*(term.den for term in terms))
    cols = [term.num * _complement(common, term.den) for term in terms]
    basis = _poly_nullspace(_match_k_powers(cols))
    m = len(known)
    w2_poly = _product(w2_atoms)
    for vec in basis:
        alphas = vec[:m]
        sigmas: list[RatFunc] | None = None
        for a_m, (sig, _) in zip(alphas, sols):
            if a_m.is_zero():
                continue
            contrib = [a_m * RatFunc(s) for s in sig]
            sigmas = contrib if sigmas is None else [
                u + v for u, v in zip(sigmas, contrib)
            ]
        if sigmas is None or all(s.is_zero() for s in sigmas):
            continue
        x1 = RF_ZERO
        for a_m, (_, x_m) in zip(alphas, sols):
            if not a_m.is_zero():
                x1 = x1 + a_m * RatFunc(x_m)
        r1 = x1 * RatFunc(setup.B1) / RatFunc(_product(r1_den))
        x2 = RF_ZERO
        for i in range(d2 + 1):
            coef = vec[m + i]
            if not coef.is_zero():
                x2 = x2 + coef * RatFunc(Poly({(0, i): Fraction(1)}))
        r2 = x2 / RatFunc(w2_poly)
        return sigmas, r1, r2
    return None


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

_SPOT_SEED = 0x5EED_CE27


def verify_certificate(
    t: HyperTerm, c: Potential | None, rec: Recurrence, cert: Certificate
) -> bool:
    """Check a telescoping identity symbolically, then spot-check it numerically.

    The symbolic check divides everything by t(n,k): for the pure kind the
    single rational identity sum_j sigma_j rho_j = R1(k+1) rt - R1 must reduce
    to zero; for the potential kind the coefficients of c and of 1 must both
    reduce to zero.  50 exact evaluations at pseudorandom in-support points
    (skipping poles) guard the symbolic path.
    """
    if (cert.kind == "potential") != (c is not None):
        return False
    r = rec.order
    rhos = _factored_rhos(t, r)
    rt = _factored_shift_ratio(t, "k")
    r1 = _Fact.from_ratfunc(cert.r1)
    r1_next = _Fact.from_ratfunc(shift_var(cert.r1, "k", 1))
    lhs1 = _FACT_ZERO
    for j in range(r + 1):
        if not rec.coeffs[j].is_zero():
            lhs1 = lhs1 + _Fact(rec.coeffs[j]) * rhos[j]
    coeff_c = lhs1 - (rt * r1_next - r1)
    if not coeff_c.is_zero():
        return False
    if cert.kind == "potential":
        f_fact = _factored_delta(c, "k")
        g_fact = _factored_delta(c, "n")
        g_steps = [_FACT_ZERO]
        for j in range(1, r + 1):
            g_steps.append(g_steps[-1] + g_fact.shift("n", j - 1))
        lhs0 = _FACT_ZERO
        for j in range(r + 1):
            if not rec.coeffs[j].is_zero():
                lhs0 = lhs0 + _Fact(rec.coeffs[j]) * rhos[j] * g_steps[j]
        r2 = _Fact.from_ratfunc(cert.r2)
        r2_next = _Fact.from_ratfunc(shift_var(cert.r2, "k", 1))
        coeff_1 = lhs0 - (rt * r1_next * f_fact + rt * r2_next - r2)
        if not coeff_1.is_zero():
            return False
    return _spot_check(t, c, rec, cert)


def _spot_check(t, c, rec, cert, points: int = 50) -> bool:
    rng = random.Random(_SPOT_SEED)
    r = rec.order
    checked = 0
    attempts = 0
    while checked < points and attempts < points * 40:
        attempts += 1
        n0 = rng.randint(r + 1, 30)
        k0 = rng.randint(0, n0)
        try:
            lhs = Fraction(0)
            for j in range(r + 1):
                term = t.eval(n0 + j, k0)
                if c is not None:
                    term *= c.eval(n0 + j, k0)
                lhs += rec.coeffs[j].eval(n0, 0) * term
            rhs = _certificate_value(t, c, cert, n0, k0 + 1) - _certificate_value(
                t, c, cert, n0, k0
            )
        except (PoleError, ZeroDivisionError, ValueError):
            continue  # pole or out-of-domain sample point
        if lhs != rhs:
            return False
        checked += 1
    return checked > 0


def _certificate_value(t, c, cert, n0, k0) -> Fraction:
    r1v = cert.r1.eval(n0, k0)
    weight = r1v * c.eval(n0, k0) + cert.r2.eval(n0, k0) if cert.kind == "potential" else r1v
    return weight * t.eval(n0, k0)


# ---------------------------------------------------------------------------
# recurrence guessing and application
# ---------------------------------------------------------------------------


def guess_recurrence(values, order: int, degree: int) -> Recurrence | None:
    """Fit a homogeneous recurrence with polynomial coefficients of bounded
    degree to exact values, or return None when only the trivial one fits.

    The linear system uses every window of the data (oversampled), so any
    returned recurrence annihilates the complete input sequence.
    """
    values = [Fraction(v) for v in values]
    needed = (order + 1) * (degree + 1) + order + 5
    if len(values) <= needed:
        raise ValueError(
            f"need more than {needed} values for order {order}, degree {degree}; "
            f"got {len(values)}"
        )
    rows = []
    for i in range(len(values) - order):
        row = []
        for j in range(order + 1):
            for dd in range(degree + 1):
                row.append(Fraction(i) ** dd * values[i + j])
        rows.append(row)
    basis = _fraction_nullspace(rows)
    if not basis:
        return None
    vec = basis[0]
    coeffs = []
    for j in range(order + 1):
        table = {}
        for dd in range(degree + 1):
            cval = vec[j * (degree + 1) + dd]
            if cval:
                table[(dd, 0)] = cval
        coeffs.append(Poly(table))
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    if not coeffs or all(p.is_zero() for p in coeffs):
        return None
    rec, _ = _assemble_recurrence([RatFunc(p) for p in coeffs], [])
    if any(apply_recurrence(rec, values, 0)):
        return None
    return rec


def apply_recurrence(rec: Recurrence, values, offset: int = 0):
    """Residuals sum_j sigma_j(n) values[i+j] with n = offset + i, for every
    window of the value list."""
    values = [Fraction(v) for v in values]
    r = rec.order
    if len(values) < r + 1:
        raise ValueError(f"need at least {r + 1} values for an order-{r} recurrence")
    out = []
    for i in range(len(values) - r):
        n0 = Fraction(offset + i)
        acc = Fraction(0)
        for j, p in enumerate(rec.coeffs):
            if not p.is_zero():
                acc += p.eval(n0, 0) * values[i + j]
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------


def recurrence_to_json(rec: Recurrence, cert: Certificate, verified: bool) -> dict:
    return {
        "order": rec.order,
        "coeffs": [str(p) for p in rec.coeffs],
        "certificate": {
            "kind": cert.kind,
            "r1": str(cert.r1),
            "r2": str(cert.r2) if cert.r2 is not None else None,
        },
        "verified": bool(verified),
    }


def recurrence_from_json(doc: dict) -> tuple[Recurrence, Certificate]:
    coeffs = []
    for text in doc["coeffs"]:
        f = parse_ratfunc(text)
        if f.den != ONE:
            raise ValueError(f"recurrence coefficient {text!r} is not a polynomial")
        coeffs.append(f.num)
    rec = Recurrence(tuple(coeffs))
    cdoc = doc["certificate"]
    r2 = parse_ratfunc(cdoc["r2"]) if cdoc.get("r2") else None
    cert = Certificate(cdoc["kind"], parse_ratfunc(cdoc["r1"]), r2)
    if rec.order != doc["order"]:
        raise ValueError("order field disagrees with coefficient count")
    return rec, cert
