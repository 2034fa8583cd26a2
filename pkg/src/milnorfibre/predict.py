"""Predicted Poincaré polynomials of the positive and negative Milnor fibres.

Two sources are provided: the published result tables, encoded literally,
and a rule turning certified Morse data of a morsification into Betti
numbers.  The rule is checked against the tables over the whole catalog.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import Mapping

from milnorfibre.germ import GermDescriptor, build_germ, enumerate_catalog, format_code, validate

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PoincarePolynomial:
    """Sparse polynomial in ``u`` with positive coefficients, or EMPTY."""

    terms: tuple[tuple[int, int], ...] = ()
    empty: bool = False

    def __post_init__(self):
        if self.empty and self.terms:
            raise ValueError("EMPTY carries no coefficients")
        if not self.empty and not self.terms:
            raise ValueError("a nonempty space has a nonzero Poincaré polynomial; use EMPTY")
        degrees = [d for d, _ in self.terms]
        if degrees != sorted(set(degrees)):
            raise ValueError("degrees must be strictly increasing")
        if any(d < 0 or c <= 0 for d, c in self.terms):
            raise ValueError("degrees must be >= 0 and coefficients > 0")

    @classmethod
    def from_mapping(cls, coefficients: Mapping[int, int]) -> "PoincarePolynomial":
        terms = tuple(sorted((d, c) for d, c in coefficients.items() if c))
        if not terms:
            return EMPTY
        return cls(terms)

    @classmethod
    def from_betti(cls, betti) -> "PoincarePolynomial":
        return cls.from_mapping({i: b for i, b in enumerate(betti)})

    @classmethod
    def one_plus(cls, degree: int, mult: int = 1) -> "PoincarePolynomial":
        """1 + mult*u^degree; a negative degree stands for the empty space."""
        if degree < 0:
            return EMPTY
        coeffs = {0: 1}
        coeffs[degree] = coeffs.get(degree, 0) + mult
        return cls.from_mapping(coeffs)

    @property
    def coefficients(self) -> dict[int, int]:
        return dict(self.terms)

    def at_one(self) -> int:
        return sum(c for _, c in self.terms)

    def betti(self, length: int) -> list[int]:
        out = [0] * length
        for d, c in self.terms:
            if d >= length:
                raise ValueError(f"degree {d} does not fit in {length} Betti numbers")
            out[d] = c
        return out

    def __str__(self) -> str:
        if self.empty:
            return "EMPTY"
        parts = []
        for d, c in self.terms:
            if d == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c if c > 1 else ''}u^{d}")
        return "+".join(parts)

    def table_style(self) -> str:
        """Rendering used in the markdown tables: empty fibre as 0, u^1 as u."""
        if self.empty:
            return "0"
        return re.sub(r"u\^1(?!\d)", "u", str(self))

    @classmethod
    def parse(cls, text: str) -> "PoincarePolynomial":
        text = text.replace(" ", "")
        if text in ("EMPTY", "0"):
            return EMPTY
        coeffs: dict[int, int] = {}
        for piece in text.split("+"):
            m = re.fullmatch(r"(\d*)(?:u(?:\^(\d+))?)?", piece)
            if not m or not piece:
                raise ValueError(f"cannot parse Poincaré polynomial term {piece!r}")
            has_u = "u" in piece
            c = int(m.group(1)) if m.group(1) else 1
            d = (int(m.group(2)) if m.group(2) else 1) if has_u else 0
            coeffs[d] = coeffs.get(d, 0) + c
        return cls.from_mapping(coeffs)


EMPTY = PoincarePolynomial(empty=True)
ONE = PoincarePolynomial(((0, 1),))


@dataclass(frozen=True)
class Prediction:
    beta_plus: PoincarePolynomial | None
    beta_minus: PoincarePolynomial | None
    status: str  # "resolved" | "unresolved"
    provenance: str  # "table" | "morse_rule"

    @property
    def resolved(self) -> bool:
        return self.status == "resolved"

    def same_values(self, other: "Prediction") -> bool:
        """Equal Betti data and status, whatever the provenance."""
        return (self.status, self.beta_plus, self.beta_minus) == (other.status, other.beta_plus, other.beta_minus)

    def pair(self) -> str:
        if not self.resolved:
            return "unresolved"
        return f"{self.beta_plus}, {self.beta_minus}"

    def to_json(self) -> dict:
        return {
            "beta_plus": None if self.beta_plus is None else str(self.beta_plus),
            "beta_minus": None if self.beta_minus is None else str(self.beta_minus),
            "status": self.status,
            "provenance": self.provenance,
        }


def _resolved(plus, minus, provenance):
    return Prediction(plus, minus, "resolved", provenance)


def _unresolved(provenance):
    return Prediction(None, None, "unresolved", provenance)


def is_open_case(d: GermDescriptor) -> bool:
    return d.family == "D" and d.sign == "minus" and d.k % 2 == 0 and d.n >= 2


def predict_table(d: GermDescriptor) -> Prediction:
    """The published Poincaré polynomials (curve table for n = 1, suspended table otherwise)."""
    validate(d)
    odd = d.k is not None and d.k % 2 == 1
    n, s = d.n, d.s
    fam, sign = d.family, d.sign
    prov = "table"
    if n == 1:
        two = PoincarePolynomial.one_plus(0)
        if fam == "A" and sign == "plus":
            return _resolved(PoincarePolynomial.one_plus(1), EMPTY, prov) if odd else _resolved(ONE, ONE, prov)
        if fam in ("A", "D") and not (fam == "D" and sign == "minus"):
            return _resolved(two, two, prov) if odd else _resolved(ONE, ONE, prov)
        if fam == "D":
            three = PoincarePolynomial.one_plus(0, 2)
            return _resolved(two, two, prov) if odd else _resolved(three, three, prov)
        if fam == "E7":
            return _resolved(two, two, prov)
        return _resolved(ONE, ONE, prov)
    if is_open_case(d):
        return _unresolved(prov)
    if fam == "A" and sign == "plus":
        if not odd:
            return _resolved(ONE, ONE, prov)
        minus = PoincarePolynomial.one_plus(s - 1) if s != 0 else EMPTY
        return _resolved(PoincarePolynomial.one_plus(n - s), minus, prov)
    if fam in ("A", "D") or fam == "E7":
        if fam != "E7" and not odd:
            return _resolved(ONE, ONE, prov)
        return _resolved(PoincarePolynomial.one_plus(n - s - 1), PoincarePolynomial.one_plus(s), prov)
    return _resolved(ONE, ONE, prov)


class UncertifiedReportError(ValueError):
    pass


def betti_from_morse(report, n: int, s: int) -> Prediction:
    """Betti data from the certified critical points of a morsification.

    No critical point: both fibres contractible.  One point of index l:
    1 + u^(n-l) and 1 + u^(l-1), a negative exponent meaning the fibre is
    empty.  Two points, both of index 1, on a curve (n = 1): 3 and 3.
    Anything else is left unresolved.
    """
    if not report.certified:
        raise UncertifiedReportError(f"Morse report for {format_code(report.germ)} is not certified")
    prov = "morse_rule"
    indices = sorted(p.morse_index for p in report.oracle)
    if not indices:
        return _resolved(ONE, ONE, prov)
    if len(indices) == 1:
        lam = indices[0]
        return _resolved(PoincarePolynomial.one_plus(n - lam), PoincarePolynomial.one_plus(lam - 1), prov)
    if len(indices) == 2 and n == 1 and indices == [1, 1] and n + 1 - indices[0] == indices[0]:
        three = PoincarePolynomial.one_plus(0, 2)
        return _resolved(three, three, prov)
    return _unresolved(prov)


# ---------------------------------------------------------------------------
# tables

CSV_FIELDS = ("germ_code", "n", "s", "beta_plus", "beta_minus", "status", "provenance", "schema_version")


def table_rows(k_max: int = 9, n_max: int = 3, n_min: int = 1) -> list[dict]:
    rows = []
    for d in enumerate_catalog(max(k_max, 4), n_max):
        if d.n < n_min or (d.k is not None and d.k > k_max):
            continue
        p = predict_table(d)
        rows.append(
            {
                "germ_code": format_code(d),
                "n": d.n,
                "s": d.s,
                "beta_plus": "" if p.beta_plus is None else str(p.beta_plus),
                "beta_minus": "" if p.beta_minus is None else str(p.beta_minus),
                "status": p.status,
                "provenance": p.provenance,
                "schema_version": SCHEMA_VERSION,
            }
        )
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _md_cell(p: PoincarePolynomial | None) -> str:
    return "unresolved" if p is None else p.table_style()


def curve_markdown(k_max: int = 9) -> str:
    lines = ["| germ | f | β(F+) | β(F−) |", "|---|---|---|---|"]
    for d in enumerate_catalog(max(k_max, 4), 1):
        if d.k is not None and d.k > k_max:
            continue
        p = predict_table(d)
        lines.append(f"| {format_code(d)} | {build_germ(d)} | {_md_cell(p.beta_plus)} | {_md_cell(p.beta_minus)} |")
    return "\n".join(lines) + "\n"


def suspension_markdown(k_max: int = 9, n_max: int = 3) -> str:
    lines = ["| germ | n | s | β(F+) | β(F−) | status |", "|---|---|---|---|---|---|"]
    for d in enumerate_catalog(max(k_max, 4), n_max):
        if d.n < 2 or (d.k is not None and d.k > k_max):
            continue
        p = predict_table(d)
        lines.append(
            f"| {format_code(d)} | {d.n} | {d.s} | {_md_cell(p.beta_plus)} | {_md_cell(p.beta_minus)} | {p.status} |"
        )
    return "\n".join(lines) + "\n"


def render_tables(k_max: int = 9, n_max: int = 3) -> dict:
    """Both result tables as markdown, CSV and JSON-ready rows."""
    curve_rows = table_rows(k_max, 1)
    suspension_rows = table_rows(k_max, n_max, n_min=2) if n_max >= 2 else []
    return {
        "schema_version": SCHEMA_VERSION,
        "theorem": {
            "markdown": curve_markdown(k_max),
            "csv": rows_to_csv(curve_rows),
            "rows": curve_rows,
        },
        "corollary": {
            "markdown": suspension_markdown(k_max, n_max),
            "csv": rows_to_csv(suspension_rows),
            "rows": suspension_rows,
        },
    }
