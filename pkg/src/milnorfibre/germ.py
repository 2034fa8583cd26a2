"""Catalog of real simple (ADE) germs with a quadratic tail.

A germ on R^{n+1} in coordinates (x, y, x1, ..., x_{n-1}) is a curve part
in (x, y) plus ``t_pos`` positive and ``s`` negative squares.  Germs are
named by short codes such as ``A3+s0n1``, ``D4-s1n2`` or ``E7s0n1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from milnorfibre.poly import MultiPoly

FAMILIES = ("A", "D", "E6", "E7", "E8")
_SIGNED = ("A", "D", "E6")


class InvalidGermError(ValueError):
    """A descriptor or germ code violates the catalog constraints."""


@dataclass(frozen=True)
class GermDescriptor:
    family: str
    k: int | None = None
    sign: str | None = None  # "plus" | "minus"
    n: int = 1
    s: int = 0
    t_pos: int = 0

    def problems(self) -> list[str]:
        """Every violated invariant, one message each (empty when valid)."""
        out = []
        if self.family not in FAMILIES:
            out.append(f"unknown family {self.family!r}")
            return out
        if self.family in ("A", "D"):
            if self.k is None:
                out.append(f"family {self.family} needs k")
            elif self.family == "A" and self.k < 2:
                out.append("k>=2 required for A_k")
            elif self.family == "D" and self.k < 4:
                out.append("k>=4 required for D_k")
        elif self.k is not None:
            out.append(f"family {self.family} takes no k")
        if self.family in _SIGNED:
            if self.sign not in ("plus", "minus"):
                out.append(f"family {self.family} needs sign plus or minus")
        elif self.sign is not None:
            out.append(f"family {self.family} has no sign variant")
        if self.n < 1:
            out.append("n>=1 required")
        if self.s < 0:
            out.append("s>=0 required")
        if self.t_pos < 0:
            out.append("t_pos>=0 required")
        if self.t_pos + self.s != self.n - 1:
            out.append(f"t_pos+s must equal n-1 (got {self.t_pos}+{self.s} vs n-1={self.n - 1})")
        return out

    @property
    def code(self) -> str:
        return format_code(self)

    @property
    def curve(self) -> "GermDescriptor":
        """The same germ without its quadratic tail (n = 1)."""
        return GermDescriptor(self.family, self.k, self.sign, 1, 0, 0)

    @property
    def spatial_variables(self) -> tuple[str, ...]:
        return ("x", "y") + tuple(f"x{i}" for i in range(1, self.n))

    def __str__(self) -> str:
        return self.code


def validate(d: GermDescriptor) -> None:
    """Raise :class:`InvalidGermError` listing every violated constraint."""
    problems = d.problems()
    if problems:
        raise InvalidGermError("; ".join(problems))


def make(family: str, k: int | None = None, sign: str | None = None, n: int = 1, s: int = 0) -> GermDescriptor:
    d = GermDescriptor(family, k, sign, n, s, n - 1 - s)
    validate(d)
    return d


_CODE = re.compile(
    r"^(?:(?P<ad>[AD])(?P<k>\d+)(?P<sign>[+-])|E6(?P<esign>[+-])|E(?P<e>[78]))s(?P<s>\d+)n(?P<n>\d+)$"
)


def parse_code(code: str) -> GermDescriptor:
    m = _CODE.match(code.strip())
    if not m:
        raise InvalidGermError(f"malformed germ code {code!r} (expected e.g. A3+s0n1, D4-s1n2, E7s0n1)")
    n, s = int(m["n"]), int(m["s"])
    sign_char = m["sign"] or m["esign"]
    sign = {"+": "plus", "-": "minus", None: None}[sign_char]
    if m["ad"]:
        family, k = m["ad"], int(m["k"])
    elif m["esign"]:
        family, k = "E6", None
    else:
        family, k = "E" + m["e"], None
    d = GermDescriptor(family, k, sign, n, s, n - 1 - s)
    validate(d)
    return d


def format_code(d: GermDescriptor) -> str:
    sign = {"plus": "+", "minus": "-"}.get(d.sign, "")
    head = f"{d.family}{d.k}" if d.family in ("A", "D") else d.family
    return f"{head}{sign}s{d.s}n{d.n}"


def _curve_part(d: GermDescriptor, variables) -> MultiPoly:
    x = MultiPoly.variable("x", variables)
    y = MultiPoly.variable("y", variables)
    eps = 1 if d.sign != "minus" else -1
    if d.family == "A":
        return x ** (d.k + 1) + eps * y**2
    if d.family == "D":
        return x**2 * y + eps * y ** (d.k - 1)
    if d.family == "E6":
        return x**3 + eps * y**4
    if d.family == "E7":
        return x**3 + x * y**3
    return x**3 + y**5


def quadratic_tail(d: GermDescriptor, variables=None) -> MultiPoly:
    """Sum of t_pos positive then s negative squares in x1, ..., x_{n-1}."""
    variables = tuple(variables or d.spatial_variables)
    tail = MultiPoly.constant(0, variables)
    for i in range(1, d.n):
        sq = MultiPoly.variable(f"x{i}", variables) ** 2
        tail = tail + sq if i <= d.t_pos else tail - sq
    return tail


def build_germ(d: GermDescriptor) -> MultiPoly:
    validate(d)
    variables = d.spatial_variables
    return _curve_part(d, variables) + quadratic_tail(d, variables)


def weights(d: GermDescriptor) -> dict[str, Fraction]:
    """Quasi-homogeneous weights making every monomial of the germ weight 1."""
    if d.family == "A":
        w = {"x": Fraction(1, d.k + 1), "y": Fraction(1, 2)}
    elif d.family == "D":
        wy = Fraction(1, d.k - 1)
        w = {"x": (1 - wy) / 2, "y": wy}
    elif d.family == "E6":
        w = {"x": Fraction(1, 3), "y": Fraction(1, 4)}
    elif d.family == "E7":
        w = {"x": Fraction(1, 3), "y": Fraction(2, 9)}
    else:
        w = {"x": Fraction(1, 3), "y": Fraction(1, 5)}
    for i in range(1, d.n):
        w[f"x{i}"] = Fraction(1, 2)
    return w


def enumerate_catalog(k_max: int = 9, n_max: int = 3) -> list[GermDescriptor]:
    """All valid descriptors with k <= k_max and n <= n_max, deterministic order."""
    if k_max < 4 or n_max < 1:
        raise ValueError("enumerate_catalog needs k_max >= 4 and n_max >= 1")
    out = []
    for n in range(1, n_max + 1):
        for s in range(n):
            for k in range(2, k_max + 1):
                for sign in ("plus", "minus"):
                    out.append(make("A", k, sign, n, s))
            for k in range(4, k_max + 1):
                for sign in ("plus", "minus"):
                    out.append(make("D", k, sign, n, s))
            for sign in ("plus", "minus"):
                out.append(make("E6", None, sign, n, s))
            out.append(make("E7", None, None, n, s))
            out.append(make("E8", None, None, n, s))
    return out
