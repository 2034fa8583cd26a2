"""One-parameter morsifications F(x, y, t) of the catalog germs.

Each family is linear in the deformation parameter ``t`` and reduces to the
germ at ``t = 0``.  The parameter ranges are one-sided intervals with 0 as a
closed endpoint; one of them has an algebraic endpoint which is kept exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from milnorfibre.germ import GermDescriptor, build_germ, format_code, quadratic_tail, validate
from milnorfibre.poly import MultiPoly

PARAM = "t"


class ParameterOutOfRange(ValueError):
    pass


def iroot_floor(n: int, d: int) -> int:
    """Largest integer r >= 0 with r**d <= n."""
    if n < 0 or d < 1:
        raise ValueError("iroot_floor needs n >= 0 and d >= 1")
    if n < 2 or d == 1:
        return n
    r = 1 << ((n.bit_length() + d - 1) // d)
    while True:
        s = ((d - 1) * r + n // r ** (d - 1)) // d
        if s >= r:
            break
        r = s
    while r**d > n:
        r -= 1
    while (r + 1) ** d <= n:
        r += 1
    return r


@dataclass(frozen=True)
class RootBound:
    """The real number ``sign * base**(1/degree)`` with base > 0."""

    base: Fraction
    degree: int
    sign: int = -1

    def __post_init__(self):
        if self.base <= 0 or self.degree < 1 or self.sign not in (1, -1):
            raise ValueError("RootBound needs base > 0, degree >= 1, sign +-1")

    def magnitude_below(self, bits: int = 40) -> Fraction:
        """Rational r with r <= base**(1/degree), within 2**-bits."""
        if self.degree == 1:
            return self.base
        scaled = (self.base.numerator << (self.degree * bits)) // self.base.denominator
        return Fraction(iroot_floor(scaled, self.degree), 1 << bits)

    def compare(self, q: Fraction) -> int:
        """Sign of (self - q), computed exactly."""
        if self.sign < 0:
            return -RootBound(self.base, self.degree, 1).compare(-q)
        if q <= 0:
            return 1
        qd = q**self.degree
        return (self.base > qd) - (self.base < qd)

    def __float__(self) -> float:
        return self.sign * float(self.base) ** (1.0 / self.degree)

    def __str__(self) -> str:
        sign = "-" if self.sign < 0 else ""
        if self.degree == 1:
            return f"{sign}{self.base}"
        return f"{sign}({self.base})^(1/{self.degree})"


def _cmp(bound, q: Fraction) -> int:
    if isinstance(bound, RootBound):
        return bound.compare(q)
    return (bound > q) - (bound < q)


@dataclass(frozen=True)
class ParamInterval:
    lo: Fraction | RootBound
    hi: Fraction | RootBound
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        lo0 = self.lo == 0 and not self.lo_open
        hi0 = self.hi == 0 and not self.hi_open
        if not (lo0 or hi0):
            raise ValueError("parameter interval must have 0 as a closed endpoint")
        if float(self.lo) >= float(self.hi):
            raise ValueError("parameter interval must have lo < hi")

    @property
    def contains_zero_endpoint(self) -> bool:
        return True

    @property
    def direction(self) -> int:
        """+1 when the deformation runs over t >= 0, -1 for t <= 0."""
        return 1 if self.lo == 0 else -1

    def contains(self, t0) -> bool:
        t0 = Fraction(t0)
        c_lo = _cmp(self.lo, t0)
        c_hi = _cmp(self.hi, t0)
        above_lo = c_lo < 0 or (c_lo == 0 and not self.lo_open)
        below_hi = c_hi > 0 or (c_hi == 0 and not self.hi_open)
        return above_lo and below_hi

    def far_endpoint(self):
        return self.hi if self.direction > 0 else self.lo

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo}, {self.hi}{right}"

    def to_json(self) -> dict:
        return {
            "lo": str(self.lo),
            "hi": str(self.hi),
            "lo_open": self.lo_open,
            "hi_open": self.hi_open,
        }


UNIT_POSITIVE = ParamInterval(Fraction(0), Fraction(1))
UNIT_NEGATIVE = ParamInterval(Fraction(-1), Fraction(0))


def d_plus_interval(k: int) -> ParamInterval:
    """(-(1/((k-1) 2^(k-2)))^(1/(k-3)), 0] for the D_k^+ family."""
    base = Fraction(1, (k - 1) * 2 ** (k - 2))
    return ParamInterval(RootBound(base, k - 3, -1), Fraction(0), lo_open=True)


@dataclass(frozen=True)
class MorsificationFamily:
    germ: GermDescriptor
    deformed: MultiPoly
    interval: ParamInterval
    case_tag: str

    @property
    def spatial_variables(self) -> tuple[str, ...]:
        return self.germ.spatial_variables

    def to_json(self) -> dict:
        return {
            "germ": format_code(self.germ),
            "case_tag": self.case_tag,
            "variables": list(self.deformed.variables),
            "polynomial": str(self.deformed),
            "interval": self.interval.to_json(),
        }


def _curve_family(d: GermDescriptor, variables) -> tuple[MultiPoly, ParamInterval, str]:
    x = MultiPoly.variable("x", variables)
    y = MultiPoly.variable("y", variables)
    t = MultiPoly.variable(PARAM, variables)
    fam, k = d.family, d.k
    if fam == "A":
        parity = "even" if k % 2 == 0 else "odd"
        if d.sign == "plus":
            tag = "A+" + parity
            if parity == "even":
                return x ** (k + 1) + t * x + y**2, UNIT_POSITIVE, tag
            return x ** (k + 1) - (k + 1) * t * x + y**2, UNIT_POSITIVE, tag
        tag = "A-" + parity
        poly = x ** (k + 1) + t * x - y**2
        return poly, (UNIT_POSITIVE if parity == "even" else UNIT_NEGATIVE), tag
    if fam == "D":
        parity = "even" if k % 2 == 0 else "odd"
        if d.sign == "plus":
            poly = x**2 * y + 2 * t * x**2 + y ** (k - 1) - t * y
            interval = UNIT_NEGATIVE if parity == "even" else d_plus_interval(k)
            return poly, interval, "D+" + parity
        poly = x**2 * y - y ** (k - 1) + (k - 1) * t * y
        return poly, UNIT_POSITIVE, "D-" + parity
    if fam == "E6":
        eps = 1 if d.sign == "plus" else -1
        return x**3 + 3 * t * x + eps * y**4, UNIT_POSITIVE, "E6" + ("+" if eps > 0 else "-")
    if fam == "E7":
        return x**3 + 3 * t * x + x * y**3 + t * y**3, UNIT_POSITIVE, "E7"
    return x**3 + 3 * t * x + y**5, UNIT_POSITIVE, "E8"


def build_family(d: GermDescriptor) -> MorsificationFamily:
    validate(d)
    variables = d.spatial_variables + (PARAM,)
    curve, interval, tag = _curve_family(d, variables)
    deformed = curve + quadratic_tail(d, variables)
    return MorsificationFamily(d, deformed, interval, tag)


def family_at(fam: MorsificationFamily, t0) -> MultiPoly:
    t0 = Fraction(t0)
    if not fam.interval.contains(t0):
        raise ParameterOutOfRange(f"t0={t0} is outside the admissible interval {fam.interval} of {fam.germ}")
    return fam.deformed.substitute(PARAM, t0)


def representative_t(fam: MorsificationFamily) -> Fraction:
    """Deterministic nonzero parameter inside the interval, at most half its width."""
    if fam.case_tag == "E7":
        return Fraction(1, 10)
    end = fam.interval.far_endpoint()
    if isinstance(end, RootBound):
        return end.sign * end.magnitude_below() / 2
    return Fraction(end) / 2


def germ_of(fam: MorsificationFamily) -> MultiPoly:
    return build_germ(fam.germ)
