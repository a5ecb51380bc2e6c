"""Exact coefficients: rational functions of the dimension symbol.

Plain rationals are :class:`fractions.Fraction`.  A :class:`RationalFunction`
is a ratio of integer polynomials in a single symbol (``n`` for Euclidean
space, ``d`` for Minkowski space), kept in a canonical form so that equal
functions are equal structurally:

* numerator and denominator share no polynomial factor,
* the integer contents of numerator and denominator are coprime,
* the leading coefficient of the denominator is positive.

Polynomials are dense tuples of ints, lowest degree first.

Text grammar (used by rendering, JSON and the CLI)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)?
    atom   := INT | SYMBOL | "(" expr ")"
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import DivisionByZeroError, PoleError

Poly = tuple  # tuple[int, ...], lowest degree first; () is zero


# ---------------------------------------------------------------------------
# dense integer / rational polynomial helpers
# ---------------------------------------------------------------------------

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def _mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _scale(a, s):
    return _trim(x * s for x in a)


def _content(a):
    g = 0
    for x in a:
        g = gcd(g, x)
    return g


def _divmod_q(a, b):
    """Polynomial division over the rationals."""
    a = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        factor = a[-1] / lead
        q[shift] = factor
        for i, y in enumerate(b):
            a[i + shift] -= factor * y
        a = list(_trim(a))
    return _trim(q), _trim(a)


def _primitive(a):
    """Scale a rational polynomial to a primitive integer one with positive lead."""
    if not a:
        return ()
    den = 1
    for x in a:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in a]
    g = _content(ints)
    if ints[-1] < 0:
        g = -g
    return tuple(x // g for x in ints)


def _poly_gcd(a, b):
    while b:
        _, r = _divmod_q(a, b)
        a, b = b, _primitive(r)
    return _primitive(a)


def _exact_div(a, b):
    q, r = _divmod_q(a, b)
    assert not r, "inexact polynomial division"
    assert all(x.denominator == 1 for x in q)
    return tuple(int(x) for x in q)


def _eval(a, x):
    acc = Fraction(0)
    for coef in reversed(a):
        acc = acc * x + coef
    return acc


# ---------------------------------------------------------------------------
# RationalFunction
# ---------------------------------------------------------------------------

class RationalFunction:
    """Canonical ratio of integer polynomials in the dimension symbol."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=(), den=(1,), *, _canonical=False):
        num = _trim(num)
        den = _trim(den)
        if not den:
            raise DivisionByZeroError("denominator polynomial is zero")
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = hash((num, den))

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value) -> RationalFunction:
        value = Fraction(value)
        if value == 0:
            return ZERO
        return cls((value.numerator,), (value.denominator,), _canonical=True)

    @classmethod
    def symbol(cls) -> RationalFunction:
        return cls((0, 1), (1,), _canonical=True)

    @classmethod
    def linear(cls, shift) -> RationalFunction:
        """The polynomial ``n + shift`` for integer ``shift``."""
        return cls((int(shift), 1), (1,), _canonical=True)

    @classmethod
    def coerce(cls, value) -> RationalFunction:
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.constant(value)
        return NotImplemented

    # predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return Fraction(self.num[0] if self.num else 0, self.den[0])

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return RationalFunction(_add(self.num, other.num), self.den)
        return RationalFunction(
            _add(_mul(self.num, other.den), _mul(other.num, self.den)),
            _mul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(tuple(-x for x in self.num), self.den, _canonical=True)

    def __sub__(self, other):
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return other
        return _cached_mul(self, other)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if self.is_zero():
            raise DivisionByZeroError("inverse of the zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = ONE
        for _ in range(e):
            out = out * self
        return out

    def scale(self, s) -> RationalFunction:
        """Multiply by a rational constant (cheap: no polynomial gcd)."""
        s = Fraction(s)
        if s == 0 or self.is_zero():
            return ZERO
        num = _scale(self.num, s.numerator)
        den = _scale(self.den, s.denominator)
        g = gcd(_content(num), _content(den))
        return RationalFunction(
            tuple(x // g for x in num), tuple(x // g for x in den), _canonical=True
        )

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.constant(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return self._hash

    # evaluation ---------------------------------------------------------

    def evaluate_at(self, value) -> Fraction:
        """Exact value at a rational point; :class:`PoleError` at a pole."""
        value = Fraction(value)
        den = _eval(self.den, value)
        if den == 0:
            factor = _render_linear((-value.numerator, value.denominator), "n")
            raise PoleError(
                f"pole at n = {value}: denominator factor {factor} vanishes",
                factor=factor,
            )
        return _eval(self.num, value) / den

    def __call__(self, value):
        return self.evaluate_at(value)

    def to_float(self, value: float) -> float:
        num = 0.0
        for c in reversed(self.num):
            num = num * value + c
        den = 0.0
        for c in reversed(self.den):
            den = den * value + c
        return num / den

    # rendering ----------------------------------------------------------

    def render(self, symbol: str = "n") -> str:
        return _render_text(self, symbol)

    def latex(self, symbol: str = "n") -> str:
        return _render_latex(self, symbol)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"RationalFunction({self.render()!r})"


def _canonicalize(num, den):
    if not num:
        return (), (1,)
    g = _poly_gcd(num, den)
    if len(g) > 1:
        num = _exact_div(num, g)
        den = _exact_div(den, g)
    c = gcd(_content(num), _content(den))
    if den[-1] < 0:
        c = -c
    return tuple(x // c for x in num), tuple(x // c for x in den)


@lru_cache(maxsize=4096)
def _cached_mul(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    if a.is_zero() or b.is_zero():
        return ZERO
    if a.is_constant():
        return b.scale(a.constant_value())
    if b.is_constant():
        return a.scale(b.constant_value())
    return RationalFunction(_mul(a.num, b.num), _mul(a.den, b.den))


ZERO = RationalFunction((), (1,), _canonical=True)
ONE = RationalFunction((1,), (1,), _canonical=True)
N = RationalFunction.symbol()


def n_plus(shift: int) -> RationalFunction:
    return RationalFunction.linear(shift)


def evaluate_at(f: RationalFunction, n_value) -> Fraction:
    return f.evaluate_at(n_value)


@lru_cache(maxsize=None)
def c_nk(k: int, shift: int = 0) -> RationalFunction:
    """``1 / prod_{j<k} (n + shift + 2j)``; ``c_nk(0) = 1``.

    ``shift = -m`` gives the coefficient for a transverse subspace of
    dimension ``n - m``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    den = (1,)
    for j in range(k):
        den = _mul(den, (shift + 2 * j, 1))
    return RationalFunction((1,), den)


@lru_cache(maxsize=None)
def rising_product(k: int, shift: int = 0) -> RationalFunction:
    """``prod_{j<k} (n + shift + 2j)`` as a polynomial."""
    return c_nk(k, shift).inverse()


# ---------------------------------------------------------------------------
# factorisation for display
# ---------------------------------------------------------------------------

def _divisors(x):
    x = abs(x)
    out = []
    i = 1
    while i * i <= x:
        if x % i == 0:
            out.append(i)
            out.append(x // i)
        i += 1
    return sorted(set(out))


def _factor(poly):
    """Split an integer polynomial into content, linear factors and a rest.

    Returns ``(content, [((b, a), multiplicity), ...], rest)`` where each
    linear factor is ``a*x + b`` with ``a > 0`` and ``gcd(a, b) = 1``.
    """
    poly = list(poly)
    content = _content(poly)
    if poly[-1] < 0:
        content = -content
    poly = tuple(x // content for x in poly)
    factors: dict = {}
    zeros = 0
    while len(poly) > 1 and poly[0] == 0:
        poly = poly[1:]
        zeros += 1
    if zeros:
        factors[(0, 1)] = zeros
    changed = True
    while changed and len(poly) > 1:
        changed = False
        for q in _divisors(poly[-1]):
            for p in _divisors(poly[0]):
                for sign in (1, -1):
                    root = Fraction(sign * p, q)
                    if _eval(poly, root) == 0:
                        lin = (-root.numerator, root.denominator)
                        poly = _exact_div(poly, lin)
                        factors[lin] = factors.get(lin, 0) + 1
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    lin = sorted(factors.items(), key=lambda item: Fraction(item[0][0], item[0][1]))
    return content, lin, poly


def _render_poly(poly, symbol):
    terms = []
    for deg in range(len(poly) - 1, -1, -1):
        c = poly[deg]
        if c == 0:
            continue
        if deg == 0:
            body = str(abs(c))
        else:
            mono = symbol if deg == 1 else f"{symbol}^{deg}"
            body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        text += f"{sign}{body}"
    return text


def _render_linear(lin, symbol):
    b, a = lin
    if b == 0 and a == 1:
        return symbol
    return f"({_render_poly((b, a), symbol)})"


def _product_parts(poly, symbol):
    content, lin, rest = _factor(poly)
    parts = []
    for factor, mult in lin:
        base = _render_linear(factor, symbol)
        parts.append(base if mult == 1 else f"{base}^{mult}")
    if len(rest) > 1:
        parts.append(f"({_render_poly(rest, symbol)})")
    return content, parts


def _render_text(f, symbol):
    if f.is_zero():
        return "0"
    ncontent, nparts = _product_parts(f.num, symbol)
    dcontent, dparts = _product_parts(f.den, symbol)
    sign = "-" if ncontent < 0 else ""
    ncontent = abs(ncontent)
    if not nparts:
        num = str(ncontent)
    elif ncontent == 1:
        num = "*".join(nparts)
    else:
        num = "*".join([str(ncontent)] + nparts)
    dfactors = ([str(dcontent)] if dcontent != 1 else []) + dparts
    if not dfactors:
        return sign + num
    if len(dfactors) == 1:
        den = dfactors[0]
    else:
        den = "(" + "*".join(dfactors) + ")"
    return f"{sign}{num}/{den}"


def _latex_symbol(symbol):
    return symbol


def _render_latex(f, symbol):
    if f.is_zero():
        return "0"

    def side(poly):
        content, parts = _product_parts(poly, symbol)
        return content, "".join(parts)

    ncontent, num = side(f.num)
    dcontent, den = side(f.den)
    sign = "-" if ncontent < 0 else ""
    ncontent = abs(ncontent)
    num = num if ncontent == 1 and num else (str(ncontent) + num)
    den = den if dcontent == 1 and den else (str(dcontent) + den if den else str(dcontent))
    if den == "1":
        return sign + num
    return f"{sign}\\frac{{{num}}}{{{den}}}"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


def _tokenize(text):
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1))))
        elif m.group(2) is not None:
            tokens.append(("sym", m.group(2)))
        elif m.group(3).strip():
            tokens.append(("op", m.group(3)))
    return tokens


class _Parser:
    def __init__(self, text, symbol):
        self.tokens = _tokenize(text)
        self.i = 0
        self.symbol = symbol

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None:
            raise ValueError("unexpected end of input" + (f", expected {value!r}" if value else ""))
        if value is not None and tok[1] != value:
            raise ValueError(f"unexpected token {tok[1]!r}, expected {value!r}")
        self.i += 1
        return tok

    def expr(self):
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            out = out * rhs if op == "*" else out / rhs
        return out

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, e = self.take()
            if kind != "int":
                raise ValueError("exponent must be an integer literal")
            base = base ** e
        return base

    def atom(self):
        kind, value = self.take()
        if kind == "int":
            return RationalFunction.constant(value)
        if kind == "sym":
            if value != self.symbol:
                raise ValueError(f"unknown symbol {value!r} (expected {self.symbol!r})")
            return N
        if value == "(":
            out = self.expr()
            self.take(")")
            return out
        raise ValueError(f"unexpected token {value!r}")


def parse_rational_function(text: str, symbol: str = "n") -> RationalFunction:
    parser = _Parser(text, symbol)
    out = parser.expr()
    if parser.i != len(parser.tokens):
        raise ValueError(f"trailing input in {text!r}")
    return out
