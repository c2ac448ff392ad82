"""Tokenizer and recursive-descent parser for summand and potential text.

One grammar serves three consumers: factorial-product terms such as
``k*(n+k)!^2/(k!^4*(n-k)!^2)``, harmonic-sum potentials such as
``1/(2*k) + H(n+k) + H(n-k) - 2*H(k)``, and plain rational functions as
rendered by :mod:`wzcert.poly`.  ``^`` and ``**`` are both accepted;
whitespace is insignificant.

Parsing evaluates directly into a :class:`SymValue`: a rational function
multiplied by factorial powers of integer-linear forms, or a rational
function plus a rational combination of harmonic numbers.  The two shapes
never mix (a sum of factorial terms is not hypergeometric, a product of
harmonic sums is not a potential), and the evaluator rejects any expression
that would need them to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .poly import Poly, RatFunc, RF_ONE

LinearForm = tuple[int, int, int]  # (a, b, c) meaning a*n + b*k + c


class ParseError(ValueError):
    """Syntax or structure error, carrying the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


@dataclass
class _Token:
    kind: str  # INT, NAME, OP, END
    value: str
    pos: int


_OPS = set("+-*/^!()")


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, N = 0, len(text)
    while i < N:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < N and text[j].isdigit():
                j += 1
            tokens.append(_Token("INT", text[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < N and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("NAME", text[i:j], i))
            i = j
        elif text.startswith("**", i):
            tokens.append(_Token("OP", "^", i))
            i += 2
        elif ch in _OPS:
            tokens.append(_Token("OP", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("END", "", N))
    return tokens


@dataclass
class SymValue:
    """Either prefactor * product of (linear)!^exp, or ratpart + sum of coef*H(linear)."""

    rat: RatFunc = field(default_factory=lambda: RF_ONE)
    factors: dict[LinearForm, int] = field(default_factory=dict)
    harmonics: dict[LinearForm, Fraction] = field(default_factory=dict)


def _merge_factors(a: dict, b: dict) -> dict:
    out = dict(a)
    for arg, e in b.items():
        s = out.get(arg, 0) + e
        if s:
            out[arg] = s
        else:
            out.pop(arg, None)
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.value != op:
            raise ParseError(f"expected {op!r}", tok.pos)
        return self.advance()

    # expr := ['+'|'-'] term (('+'|'-') term)*
    def parse_expr(self) -> SymValue:
        tok = self.peek()
        negate = False
        if tok.kind == "OP" and tok.value in "+-":
            self.advance()
            negate = tok.value == "-"
        value = self.parse_term()
        if negate:
            value = self._negate(value)
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.value in "+-":
                self.advance()
                rhs = self.parse_term()
                if tok.value == "-":
                    rhs = self._negate(rhs)
                value = self._add(value, rhs, tok.pos)
            else:
                return value

    # term := factor (('*'|'/') factor)*
    def parse_term(self) -> SymValue:
        value = self.parse_factor()
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.value in "*/":
                self.advance()
                rhs = self.parse_factor()
                if tok.value == "*":
                    value = self._mul(value, rhs, tok.pos)
                else:
                    value = self._div(value, rhs, tok.pos)
            else:
                return value

    # factor := primary ['!'] [('^'|'**') signed-int]
    def parse_factor(self) -> SymValue:
        value = self.parse_primary()
        tok = self.peek()
        if tok.kind == "OP" and tok.value == "!":
            self.advance()
            value = self._factorial(value, tok.pos)
            tok = self.peek()
        if tok.kind == "OP" and tok.value == "^":
            self.advance()
            value = self._power(value, self._signed_int(), tok.pos)
        return value

    def _signed_int(self) -> int:
        sign = 1
        tok = self.peek()
        if tok.kind == "OP" and tok.value in "+-":
            self.advance()
            sign = -1 if tok.value == "-" else 1
            tok = self.peek()
        if tok.kind != "INT":
            raise ParseError("expected integer exponent", tok.pos)
        self.advance()
        return sign * int(tok.value)

    # primary := INT | 'n' | 'k' | 'H' '(' expr ')' | '(' expr ')'
    def parse_primary(self) -> SymValue:
        tok = self.advance()
        if tok.kind == "INT":
            return SymValue(rat=RatFunc.const(int(tok.value)))
        if tok.kind == "NAME":
            if tok.value in ("n", "k"):
                return SymValue(rat=RatFunc.var(tok.value))
            if tok.value == "H":
                self.expect_op("(")
                inner = self.parse_expr()
                self.expect_op(")")
                arg = self._linear_form(inner, tok.pos)
                return SymValue(rat=RatFunc.const(0), harmonics={arg: Fraction(1)})
            raise ParseError(f"unknown name {tok.value!r} (variables are n, k)", tok.pos)
        if tok.kind == "OP" and tok.value == "(":
            inner = self.parse_expr()
            close = self.peek()
            if close.kind != "OP" or close.value != ")":
                raise ParseError("unbalanced parenthesis", tok.pos)
            self.advance()
            return inner
        raise ParseError(f"unexpected token {tok.value!r}", tok.pos)

    # -- value algebra --------------------------------------------------------

    @staticmethod
    def _negate(v: SymValue) -> SymValue:
        return SymValue(
            rat=-v.rat,
            factors=dict(v.factors),
            harmonics={a: -c for a, c in v.harmonics.items()},
        )

    @staticmethod
    def _add(u: SymValue, v: SymValue, pos: int) -> SymValue:
        if u.factors or v.factors:
            raise ParseError("cannot add factorial terms (not hypergeometric)", pos)
        harm = dict(u.harmonics)
        for arg, c in v.harmonics.items():
            s = harm.get(arg, Fraction(0)) + c
            if s:
                harm[arg] = s
            else:
                harm.pop(arg, None)
        return SymValue(rat=u.rat + v.rat, harmonics=harm)

    @staticmethod
    def _is_const(v: SymValue) -> bool:
        return not v.factors and not v.harmonics and v.rat.is_const()

    def _mul(self, u: SymValue, v: SymValue, pos: int) -> SymValue:
        if u.harmonics or v.harmonics:
            if u.harmonics and self._is_const(v):
                c = v.rat.const_value()
                return SymValue(
                    rat=u.rat * c,
                    harmonics={a: q * c for a, q in u.harmonics.items() if q * c},
                )
            if v.harmonics and self._is_const(u):
                return self._mul(v, u, pos)
            raise ParseError("harmonic sums admit only rational-constant multipliers", pos)
        return SymValue(rat=u.rat * v.rat, factors=_merge_factors(u.factors, v.factors))

    def _div(self, u: SymValue, v: SymValue, pos: int) -> SymValue:
        if v.harmonics:
            raise ParseError("cannot divide by a harmonic sum", pos)
        if u.harmonics:
            if self._is_const(v):
                c = v.rat.const_value()
                if c == 0:
                    raise ParseError("division by zero", pos)
                return SymValue(
                    rat=u.rat / c,
                    harmonics={a: q / c for a, q in u.harmonics.items()},
                )
            raise ParseError("harmonic sums admit only rational-constant divisors", pos)
        if v.rat.is_zero():
            raise ParseError("division by zero", pos)
        return SymValue(
            rat=u.rat / v.rat,
            factors=_merge_factors(u.factors, {a: -e for a, e in v.factors.items()}),
        )

    @staticmethod
    def _power(v: SymValue, m: int, pos: int) -> SymValue:
        if v.harmonics:
            if m == 1:
                return v
            raise ParseError("cannot raise a harmonic sum to a power", pos)
        if v.rat.is_zero() and m < 0:
            raise ParseError("zero to a negative power", pos)
        return SymValue(rat=v.rat**m, factors={a: e * m for a, e in v.factors.items() if e * m})

    def _factorial(self, v: SymValue, pos: int) -> SymValue:
        arg = self._linear_form(v, pos)
        return SymValue(factors={arg: 1})

    @staticmethod
    def _linear_form(v: SymValue, pos: int) -> LinearForm:
        if v.factors or v.harmonics:
            raise ParseError("argument must be an integer-linear form in n, k", pos)
        f = v.rat
        if f.den != Poly.const(1):
            raise ParseError("argument must be an integer-linear form in n, k", pos)
        a = b = c = Fraction(0)
        for (dn, dk), coef in f.num.items():
            if (dn, dk) == (0, 0):
                c = coef
            elif (dn, dk) == (1, 0):
                a = coef
            elif (dn, dk) == (0, 1):
                b = coef
            else:
                raise ParseError("argument must be an integer-linear form in n, k", pos)
        if any(x.denominator != 1 for x in (a, b, c)):
            raise ParseError("argument must have integer coefficients", pos)
        return (int(a), int(b), int(c))


def parse_symvalue(text: str) -> SymValue:
    """Parse a full expression, requiring the whole input to be consumed."""
    parser = _Parser(text)
    value = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "END":
        raise ParseError(f"unexpected trailing input {tok.value!r}", tok.pos)
    return value


def parse_ratfunc(text: str) -> RatFunc:
    """Parse a plain rational function (no factorials, no harmonic sums)."""
    v = parse_symvalue(text)
    if v.factors or v.harmonics:
        raise ParseError("expected a plain rational function", 0)
    return v.rat


def render_linear(form: LinearForm) -> str:
    """Render a*n + b*k + c compactly, e.g. ``n+k``, ``n-k``, ``2*n+k-1``."""
    a, b, c = form
    parts = []
    for coef, name in ((a, "n"), (b, "k")):
        if coef == 0:
            continue
        mag = name if abs(coef) == 1 else f"{abs(coef)}*{name}"
        if not parts:
            parts.append(mag if coef > 0 else f"-{mag}")
        else:
            parts.append(f"+{mag}" if coef > 0 else f"-{mag}")
    if c != 0 or not parts:
        if not parts:
            parts.append(str(c))
        else:
            parts.append(f"+{c}" if c > 0 else f"-{-c}")
    return "".join(parts)
