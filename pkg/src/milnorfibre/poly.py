"""Exact multivariate polynomials over the rationals, with interval evaluation.

Coefficients are :class:`fractions.Fraction`; exponent vectors are tuples of
small nonnegative integers aligned with an ordered tuple of variable names.
Everything here is immutable.

Intervals use binary floating point endpoints.  After each operation the
rounding error is recovered with an error-free transformation (TwoSum,
Dekker's product) and an endpoint is moved outward only when the float
result was inexact, so enclosures are sound and exact results stay exact.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction]

_INF = math.inf


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


_SPLITTER = 134217729.0  # 2**27 + 1
_SAFE_HI = 2.0**996
_SAFE_LO = 2.0**-969


def _sum_err(a: float, b: float, s: float) -> float:
    """Exact a + b - s for s = fl(a + b) (nan when not representable)."""
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _prod_err(a: float, b: float, p: float) -> float:
    """Exact a * b - p for p = fl(a * b), or nan outside the safe range."""
    if not (_SAFE_LO < abs(p) < _SAFE_HI) or abs(a) >= _SAFE_HI or abs(b) >= _SAFE_HI:
        return math.nan
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _lo_of(value: float, err: float) -> float:
    if err == 0.0 and value == value:
        return value
    if err > 0.0:
        return value
    return _down(value)


def _hi_of(value: float, err: float) -> float:
    if err == 0.0 and value == value:
        return value
    if err < 0.0:
        return value
    return _up(value)


def _add_lo(a, b):
    s = a + b
    return _lo_of(s, _sum_err(a, b, s)) if math.isfinite(s) else s


def _add_hi(a, b):
    s = a + b
    return _hi_of(s, _sum_err(a, b, s)) if math.isfinite(s) else s


def _mul_lo(a, b):
    p = a * b
    if p == 0.0 and (a == 0.0 or b == 0.0):
        return 0.0
    return _lo_of(p, _prod_err(a, b, p)) if math.isfinite(p) else p


def _mul_hi(a, b):
    p = a * b
    if p == 0.0 and (a == 0.0 or b == 0.0):
        return 0.0
    return _hi_of(p, _prod_err(a, b, p)) if math.isfinite(p) else p


def _float_below(q) -> float:
    f = float(q)
    if isinstance(q, float) or Fraction(f) == q:
        return f
    return f if Fraction(f) < q else _down(f)


def _float_above(q) -> float:
    f = float(q)
    if isinstance(q, float) or Fraction(f) == q:
        return f
    return f if Fraction(f) > q else _up(f)


def _pow_down(a: float, n: int) -> float:
    # a >= 0
    r = 1.0
    for _ in range(n):
        r = _mul_lo(r, a)
    return max(r, 0.0)


def _pow_up(a: float, n: int) -> float:
    r = 1.0
    for _ in range(n):
        r = _mul_hi(r, a)
    return r


class Interval:
    """Closed interval ``[lo, hi]`` with outward-rounded float endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo_f = _float_below(lo)
        hi_f = _float_above(hi)
        if lo_f > hi_f:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo_f
        self.hi = hi_f

    @classmethod
    def _raw(cls, lo: float, hi: float) -> "Interval":
        iv = object.__new__(cls)
        if lo != lo or hi != hi:  # NaN from inf*0
            lo, hi = -_INF, _INF
        iv.lo = lo
        iv.hi = hi
        return iv

    @classmethod
    def hull_of(cls, values: Iterable[float]) -> "Interval":
        vals = list(values)
        return cls(min(vals), max(vals))

    # -- queries ---------------------------------------------------------
    def bounds(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.lo), Fraction(self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        m = 0.5 * (self.lo + self.hi)
        if not (self.lo <= m <= self.hi):
            m = self.lo
        return m

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return Fraction(self.lo) <= x <= Fraction(self.hi) if isinstance(x, Fraction) else self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def interior_contains(self, other: "Interval") -> bool:
        return self.lo < other.lo and other.hi < self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval._raw(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval._raw(min(self.lo, other.lo), max(self.hi, other.hi))

    def split(self, ratio: float = 0.5) -> tuple["Interval", "Interval"]:
        c = self.lo + ratio * (self.hi - self.lo)
        if not (self.lo < c < self.hi):
            c = self.mid
        return Interval._raw(self.lo, c), Interval._raw(c, self.hi)

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "Interval":
        return x if isinstance(x, Interval) else Interval(x)

    def __neg__(self) -> "Interval":
        return Interval._raw(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        o = Interval._coerce(other)
        return Interval._raw(_add_lo(self.lo, o.lo), _add_hi(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = Interval._coerce(other)
        return Interval._raw(_add_lo(self.lo, -o.hi), _add_hi(self.hi, -o.lo))

    def __rsub__(self, other) -> "Interval":
        return Interval._coerce(other) - self

    def __mul__(self, other) -> "Interval":
        o = Interval._coerce(other)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(_mul_lo(a, b) for a, b in pairs)
        hi = max(_mul_hi(a, b) for a, b in pairs)
        return Interval._raw(lo, hi)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Interval":
        if n < 0:
            raise ValueError("negative exponent")
        if n == 0:
            return Interval._raw(1.0, 1.0)
        if n == 1:
            return self
        lo, hi = self.lo, self.hi
        if n % 2 == 0:
            if lo >= 0:
                return Interval._raw(_pow_down(lo, n), _pow_up(hi, n))
            if hi <= 0:
                return Interval._raw(_pow_down(-hi, n), _pow_up(-lo, n))
            return Interval._raw(0.0, _pow_up(max(-lo, hi), n))
        new_lo = _pow_down(lo, n) if lo >= 0 else -_pow_up(-lo, n)
        new_hi = _pow_up(hi, n) if hi >= 0 else -_pow_down(-hi, n)
        return Interval._raw(new_lo, new_hi)

    def __eq__(self, other) -> bool:
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _var_sort_key(name: str):
    if name == "x":
        return (0, 0, "")
    if name == "y":
        return (1, 0, "")
    m = re.fullmatch(r"x(\d+)", name)
    if m:
        return (2, int(m.group(1)), "")
    if name == "t":
        return (4, 0, "")
    return (3, 0, name)


def canonical_variables(names: Iterable[str]) -> tuple[str, ...]:
    """Order variable names as ``x, y, x1, x2, ..., <others>, t``."""
    return tuple(sorted(set(names), key=_var_sort_key))


class MultiPoly:
    """Polynomial with rational coefficients in an ordered set of variables."""

    __slots__ = ("variables", "terms", "__dict__")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, Number] | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        clean: dict[tuple, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise ValueError(f"exponent vector {exps} does not match {len(variables)} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _as_fraction(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self.variables = variables
        self.terms = clean

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, value: Number, variables: Sequence[str] = ()) -> "MultiPoly":
        n = len(tuple(variables))
        return cls(variables, {(0,) * n: value})

    @classmethod
    def variable(cls, name: str, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise KeyError(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    # -- structure -------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self._index(var)
        return max(e[i] for e in self.terms)

    def support(self) -> frozenset[str]:
        """Variables that actually occur with a nonzero exponent."""
        used = set()
        for exps in self.terms:
            for v, e in zip(self.variables, exps):
                if e:
                    used.add(v)
        return frozenset(used)

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise KeyError(f"unknown variable {var!r}; declared {self.variables}") from None

    def with_variables(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over ``variables``; every used variable must be present."""
        variables = tuple(variables)
        missing = self.support() - set(variables)
        if missing:
            raise ValueError(f"variables {sorted(missing)} are used but not in {variables}")
        pos = {v: i for i, v in enumerate(self.variables)}
        terms = {}
        for exps, c in self.terms.items():
            terms[tuple(exps[pos[v]] if v in pos else 0 for v in variables)] = c
        return MultiPoly(variables, terms)

    def _aligned(self, other: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        if self.variables == other.variables:
            return self, other
        merged = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return self.with_variables(merged), other.with_variables(merged)

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(_as_fraction(other), self.variables)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other) -> "MultiPoly":
        a, b = self._aligned(self._lift(other))
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return MultiPoly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "MultiPoly":
        a, b = self._aligned(self._lift(other))
        terms: dict[tuple, Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(a.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self._lift(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    # -- calculus --------------------------------------------------------
    def partial(self, var: str) -> "MultiPoly":
        i = self._index(var)
        terms = {}
        for exps, c in self.terms.items():
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                terms[tuple(e)] = c * exps[i]
        return MultiPoly(self.variables, terms)

    def jacobian(self, variables: Sequence[str]) -> list["MultiPoly"]:
        variables = list(variables)
        if not variables:
            raise ValueError("jacobian needs at least one variable")
        return [self.partial(v) for v in variables]

    def hessian(self, variables: Sequence[str]) -> list[list["MultiPoly"]]:
        grad = self.jacobian(variables)
        return [[g.partial(v) for v in variables] for g in grad]

    def substitute(self, var: str, value: Number) -> "MultiPoly":
        i = self._index(var)
        value = _as_fraction(value)
        rest = self.variables[:i] + self.variables[i + 1:]
        terms: dict[tuple, Fraction] = {}
        for exps, c in self.terms.items():
            e = exps[:i] + exps[i + 1:]
            terms[e] = terms.get(e, Fraction(0)) + c * value ** exps[i]
        return MultiPoly(rest, terms)

    # -- evaluation ------------------------------------------------------
    def evaluate(self, point: Sequence[Number]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, polynomial has {self.nvars} variables")
        pt = [_as_fraction(p) for p in point]
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = c
            for x, e in zip(pt, exps):
                if e:
                    term *= x ** e
            total += term
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for exps, c in self._float_terms:
            term = c
            for x, e in zip(point, exps):
                if e:
                    term *= x ** e
            total += term
        return total

    @cached_property
    def _float_terms(self) -> list[tuple[tuple, float]]:
        return [(e, float(c)) for e, c in self.terms.items()]

    @cached_property
    def _interval_terms(self) -> list[tuple[tuple, Interval]]:
        return [(e, Interval(c, c)) for e, c in self.terms.items()]

    def eval_interval(self, box: Sequence[Interval], splits: int = 0) -> Interval:
        """Enclosure of the range of the polynomial over ``box``.

        Naive interval extension; with ``splits > 0`` the widest coordinate
        is bisected recursively that many times and the pieces are hulled.
        """
        if len(box) != self.nvars:
            raise ValueError(f"box has {len(box)} coordinates, polynomial has {self.nvars} variables")
        if splits > 0 and box:
            k = max(range(len(box)), key=lambda i: box[i].width)
            if box[k].width > 0:
                a, b = box[k].split()
                left = self.eval_interval([*box[:k], a, *box[k + 1:]], splits - 1)
                right = self.eval_interval([*box[:k], b, *box[k + 1:]], splits - 1)
                return left.hull(right)
        lo = hi = 0.0
        for exps, c in self._interval_terms:
            term = c
            for x, e in zip(box, exps):
                if e:
                    term = term * (x ** e)
            lo = _add_lo(lo, term.lo)
            hi = _add_hi(hi, term.hi)
        if not self.terms:
            return Interval._raw(0.0, 0.0)
        return Interval._raw(lo, hi)

    # -- text ------------------------------------------------------------
    def _sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: tuple(-e for e in kv[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exps, c in self._sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, exps) if e
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append((c < 0, body))
        neg, body = pieces[0]
        out = ("-" if neg else "") + body
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self) -> str:
        return f"MultiPoly({self.variables!r}, {str(self)!r})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class PolySyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif name is not None:
            tokens.append(("name", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise PolySyntaxError(f"expected {value or 'token'}, got {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> MultiPoly:
        result = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> MultiPoly:
        result = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                result = result * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise PolySyntaxError("division only by nonzero constants")
                c = rhs.terms[(0,) * rhs.nvars]
                result = result * MultiPoly.constant(1 / c, result.variables)
        return result

    def unary(self) -> MultiPoly:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise PolySyntaxError("exponent must be a nonnegative integer literal")
            return base ** int(val)
        return base

    def atom(self) -> MultiPoly:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return MultiPoly.constant(int(val), self.variables)
        if kind == "name":
            self.take()
            return MultiPoly.variable(val, self.variables)
        if (kind, val) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        raise PolySyntaxError(f"unexpected token {val!r}")


def parse_poly(text: str, variables: Sequence[str] | None = None) -> MultiPoly:
    """Parse ``x^2*y - y^3 + 4*t*y`` style text.

    Without ``variables`` the names found in the text are used, in the
    canonical order (x, y, x1, x2, ..., others, t).
    """
    tokens = _tokenize(text)
    if not tokens:
        raise PolySyntaxError("empty polynomial")
    if variables is None:
        variables = canonical_variables(v for k, v in tokens if k == "name")
    parser = _Parser(tokens, tuple(variables))
    try:
        result = parser.expr()
    except KeyError as exc:
        raise PolySyntaxError(str(exc)) from None
    if parser.i != len(tokens):
        raise PolySyntaxError(f"trailing input at token {parser.i}: {tokens[parser.i][1]!r}")
    return result
