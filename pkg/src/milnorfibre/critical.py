"""Critical points of morsified germs, with interval certificates.

Two independent routes are kept side by side:

* ``closed_form_points`` encodes the explicit critical points of each
  morsification family (enclosed in tiny boxes via exact root bracketing);
* ``certify_points`` searches a box with bisection plus the Krawczyk
  operator and proves existence/uniqueness or absence of gradient zeros.

Morse indices always come from a certified Hessian inertia computation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from milnorfibre.germ import GermDescriptor, format_code
from milnorfibre.morsify import PARAM, MorsificationFamily, build_family, family_at, representative_t
from milnorfibre.poly import Interval, MultiPoly

log = logging.getLogger(__name__)

DEFAULT_HALF_WIDTH = 2
BOX_BUDGET = 100_000
SPLIT_RATIO = 0.4921875  # off-centre so symmetric zeros do not land on cuts
REFINE_WIDTH = 1e-9


class CertificationError(RuntimeError):
    """A certificate could not be produced (budget exhausted, sign undecided)."""


class SignatureUndecided(CertificationError):
    pass


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class CriticalPoint:
    location: tuple[Interval, ...]
    morse_index: int
    signature: tuple[int, int, int]
    certified: bool
    source: str  # "closed_form" | "interval_solver"
    exact: tuple[str, ...] | None = None

    def __post_init__(self):
        n_pos, n_neg, n_zero = self.signature
        if self.morse_index != n_neg:
            raise ValueError("morse index must equal the number of negative Hessian eigenvalues")
        if n_pos + n_neg + n_zero != len(self.location):
            raise ValueError("signature does not match the spatial dimension")
        if self.certified and n_zero:
            raise ValueError("a certified critical point must be nondegenerate")

    @property
    def midpoint(self) -> tuple[float, ...]:
        return tuple(iv.mid for iv in self.location)

    def to_json(self) -> dict:
        return {
            "box": [[repr(iv.lo), repr(iv.hi)] for iv in self.location],
            "exact": list(self.exact) if self.exact else None,
            "morse_index": self.morse_index,
            "signature": list(self.signature),
            "certified": self.certified,
            "source": self.source,
        }


@dataclass(frozen=True)
class Certificate:
    box: tuple[Interval, ...]
    kind: str  # "unique_zero" | "no_zero" | "undecided"
    method: str

    def to_json(self) -> dict:
        return {"box": [[repr(iv.lo), repr(iv.hi)] for iv in self.box], "kind": self.kind, "method": self.method}


def _box_contains(outer: Sequence[Interval], inner: Sequence[Interval]) -> bool:
    return all(o.contains(i) for o, i in zip(outer, inner))


def _box_intersects(a: Sequence[Interval], b: Sequence[Interval]) -> bool:
    return all(x.intersects(y) for x, y in zip(a, b))


def _box_width(box: Sequence[Interval]) -> float:
    return max(iv.width for iv in box)


def standard_box(dim: int, half_width=DEFAULT_HALF_WIDTH) -> tuple[Interval, ...]:
    return tuple(Interval(-half_width, half_width) for _ in range(dim))


# ---------------------------------------------------------------------------
# exact root enclosures


def root_enclosure(a: Fraction, k: int, rel: float = 1e-13) -> Interval:
    """Tight interval around the real k-th root of ``a`` (positive root if k even)."""
    a = Fraction(a)
    if k < 1:
        raise ValueError("root degree must be positive")
    if a == 0:
        return Interval(0)
    if a < 0:
        if k % 2 == 0:
            raise ValueError(f"no real {k}-th root of negative {a}")
        return -root_enclosure(-a, k, rel)
    approx = float(a) ** (1.0 / k)
    delta = approx * rel
    lo, hi = approx - delta, approx + delta
    for _ in range(60):
        flo, fhi = Fraction(lo), Fraction(hi)
        ok_lo = flo <= 0 or flo**k <= a
        ok_hi = fhi**k >= a
        if ok_lo and ok_hi:
            return Interval(flo, fhi)
        delta *= 4
        if not ok_lo:
            lo = approx - delta
        if not ok_hi:
            hi = approx + delta
    raise CertificationError(f"could not bracket the {k}-th root of {a}")


# ---------------------------------------------------------------------------
# closed-form critical points


def _closed_form_curve(tag: str, k: int | None, t: Fraction) -> list[tuple[tuple[Interval, Interval], tuple[str, str]]]:
    if tag in ("A+even", "A-even", "D+even", "E6+", "E6-", "E8"):
        return []
    if tag == "A+odd":
        return [((root_enclosure(t, k), Interval(0)), (f"({t})^(1/{k})", "0"))]
    if tag == "A-odd":
        a = -t / (k + 1)
        return [((root_enclosure(a, k), Interval(0)), (f"({a})^(1/{k})", "0"))]
    if tag == "D+odd":
        # x = 0 and (k-1) y^(k-2) = t
        a = t / (k - 1)
        return [((Interval(0), root_enclosure(a, k - 2)), ("0", f"({a})^(1/{k - 2})"))]
    if tag == "D-odd":
        return [((Interval(0), root_enclosure(t, k - 2)), ("0", f"({t})^(1/{k - 2})"))]
    if tag == "D-even":
        r = root_enclosure(t, k - 2)
        return [
            ((Interval(0), r), ("0", f"({t})^(1/{k - 2})")),
            ((Interval(0), -r), ("0", f"-({t})^(1/{k - 2})")),
        ]
    if tag == "E7":
        a = 3 * (t * t + t)
        return [((Interval(-t), -root_enclosure(a, 3)), (str(-t), f"-({a})^(1/3)"))]
    raise ValueError(f"unknown case tag {tag!r}")


def closed_form_points(fam: MorsificationFamily, t0) -> list[CriticalPoint]:
    """The family's explicit critical points at parameter ``t0`` with certified indices."""
    t0 = Fraction(t0)
    if t0 == 0:
        raise ValueError("t0 = 0 is the germ itself, which has a degenerate critical point")
    f_t = family_at(fam, t0)
    tail = fam.germ.n - 1
    points = []
    for (bx, by), (ex, ey) in _closed_form_curve(fam.case_tag, fam.germ.k, t0):
        location = (bx, by) + tuple(Interval(0) for _ in range(tail))
        exact = (ex, ey) + ("0",) * tail
        sig = hessian_signature(f_t, location)
        points.append(CriticalPoint(location, sig[1], sig, sig[2] == 0, "closed_form", exact))
    return points


# ---------------------------------------------------------------------------
# interval solver


class _System:
    """Square polynomial system with cached interval/float evaluators."""

    def __init__(self, components: Sequence[MultiPoly]):
        self.components = tuple(components)
        self.variables = self.components[0].variables
        self.dim = len(self.variables)
        self.jac = tuple(tuple(g.partial(v) for v in self.variables) for g in self.components)

    def values(self, box):
        return [g.eval_interval(box) for g in self.components]

    def jacobian(self, box):
        return [[d.eval_interval(box) for d in row] for row in self.jac]

    def f_float(self, x):
        return np.array([g.evaluate_float(x) for g in self.components])

    def j_float(self, x):
        return np.array([[d.evaluate_float(x) for d in row] for row in self.jac])

    def krawczyk(self, box):
        """Krawczyk image of ``box`` or None when the midpoint Jacobian is singular."""
        m = [iv.mid for iv in box]
        mbox = [Interval._raw(v, v) for v in m]
        fm = self.values(mbox)
        jx = self.jacobian(box)
        jmid = np.array([[0.5 * (e.lo + e.hi) for e in row] for row in jx])
        if not np.all(np.isfinite(jmid)):
            return None
        try:
            y = np.linalg.inv(jmid)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(y)):
            return None
        n = self.dim
        yi = [[Interval._raw(float(y[i, j]), float(y[i, j])) for j in range(n)] for i in range(n)]
        dx = [box[j] - m[j] for j in range(n)]
        out = []
        for i in range(n):
            acc = mbox[i]
            for j in range(n):
                acc = acc - yi[i][j] * fm[j]
            for j in range(n):
                c = Interval._raw(1.0, 1.0) if i == j else Interval._raw(0.0, 0.0)
                for l in range(n):
                    c = c - yi[i][l] * jx[l][j]
                acc = acc + c * dx[j]
            out.append(acc)
        return out

    def newton(self, x0, iterations: int = 30):
        x = np.array(x0, dtype=float)
        for _ in range(iterations):
            try:
                step = np.linalg.solve(self.j_float(x), self.f_float(x))
            except np.linalg.LinAlgError:
                return None
            if not np.all(np.isfinite(step)):
                return None
            x = x - step
            if np.max(np.abs(step)) <= 1e-15 * max(1.0, np.max(np.abs(x))):
                break
        return x

    def certify_unique(self, box):
        """True when Krawczyk proves exactly one zero in ``box``."""
        k = self.krawczyk(box)
        return k is not None and all(b.interior_contains(ki) for b, ki in zip(box, k))

    def contract(self, box, width: float = REFINE_WIDTH, rounds: int = 60):
        """Shrink a box known to hold a unique zero, keeping the zero inside."""
        for _ in range(rounds):
            if _box_width(box) <= width:
                break
            k = self.krawczyk(box)
            if k is None:
                break
            new = []
            for b, ki in zip(box, k):
                c = b.intersect(ki)
                if c is None:
                    return box
                new.append(c)
            if _box_width(new) >= 0.9 * _box_width(box):
                box = new
                break
            box = new
        return tuple(box)


def _centered_box(center, radius):
    return tuple(Interval(float(c) - radius, float(c) + radius) for c in center)


def _solve_block(system: _System, box: tuple[Interval, ...], budget: int) -> list[Certificate]:
    uniques: list[tuple[Interval, ...]] = []
    no_zero: list[Certificate] = []
    undecided: list[Certificate] = []
    stack = [tuple(box)]
    processed = 0
    init_width = _box_width(box)
    small = init_width * 2.0**-18

    def register(candidate, method):
        for i, u in enumerate(uniques):
            if _box_intersects(candidate, u):
                hull = tuple(a.hull(b) for a, b in zip(candidate, u))
                if system.certify_unique(hull):
                    return
                tight = system.contract(candidate, width=1e-13)
                if _box_contains(u, tight) or _box_intersects(tight, u):
                    return
                candidate = tight
        uniques.append(tuple(candidate))

    while stack:
        current = stack.pop()
        if any(_box_contains(u, current) for u in uniques):
            continue
        processed += 1
        if processed > budget:
            undecided.append(Certificate(current, "undecided", "budget exhausted"))
            undecided.extend(Certificate(b, "undecided", "budget exhausted") for b in stack)
            break
        if any(not v.contains_zero() for v in system.values(current)):
            no_zero.append(Certificate(current, "no_zero", "interval range excludes 0"))
            continue
        k = system.krawczyk(current)
        if k is not None:
            inter = [b.intersect(ki) for b, ki in zip(current, k)]
            if any(c is None for c in inter):
                no_zero.append(Certificate(current, "no_zero", "krawczyk image disjoint"))
                continue
            if all(b.interior_contains(ki) for b, ki in zip(current, k)):
                z = system.newton([iv.mid for iv in current])
                placed = False
                if z is not None and all(b.contains(float(zi)) for b, zi in zip(current, z)):
                    centered = _centered_box(z, 0.5 * _box_width(current))
                    if system.certify_unique(centered):
                        register(centered, "krawczyk")
                        placed = True
                if not placed:
                    register(current, "krawczyk")
                if not any(_box_contains(u, current) for u in uniques):
                    stack.extend(_bisect(current))
                continue
        if _box_width(current) < small:
            z = system.newton([iv.mid for iv in current])
            if z is not None and all(abs(float(zi) - b.mid) <= 2 * b.width + 1e-300 for b, zi in zip(current, z)):
                radius = max(2 * _box_width(current), 1e-12)
                centered = _centered_box(z, radius)
                if system.certify_unique(centered):
                    register(centered, "krawczyk+inflation")
                    if not any(_box_contains(u, current) for u in uniques):
                        stack.extend(_bisect(current))
                    continue
            if _box_width(current) < init_width * 2.0**-40:
                undecided.append(Certificate(current, "undecided", "cannot separate"))
                continue
        stack.extend(_bisect(current))

    certs = [Certificate(system.contract(u), "unique_zero", "krawczyk") for u in uniques]
    return certs + no_zero + undecided


def _bisect(box):
    k = max(range(len(box)), key=lambda i: box[i].width)
    a, b = box[k].split(SPLIT_RATIO)
    # pushed in reverse so the lower half is processed first
    return [box[:k] + (b,) + box[k + 1:], box[:k] + (a,) + box[k + 1:]]


def _blocks(components: Sequence[MultiPoly]) -> list[tuple[list[int], list[int]]] | None:
    """Split a square system into independent (components, variables) blocks."""
    variables = components[0].variables
    parent = list(range(len(variables)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    supports = []
    for g in components:
        idx = [variables.index(v) for v in g.support()]
        supports.append(idx)
        for a in idx[1:]:
            parent[find(a)] = find(idx[0])
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for vi in range(len(variables)):
        groups.setdefault(find(vi), ([], []))[1].append(vi)
    for ci, idx in enumerate(supports):
        if not idx:
            return None
        groups[find(idx[0])][0].append(ci)
    blocks = sorted(groups.values(), key=lambda b: b[1][0])
    if any(len(c) != len(v) for c, v in blocks):
        return None
    return blocks


@lru_cache(maxsize=4096)
def _solve_cached(components: tuple[MultiPoly, ...], box: tuple[tuple[float, float], ...], budget: int):
    boxi = tuple(Interval._raw(lo, hi) for lo, hi in box)
    return tuple(_solve_block(_System(components), boxi, budget))


def solve_system(components: Sequence[MultiPoly], box: Sequence[Interval], budget: int = BOX_BUDGET) -> list[Certificate]:
    """Certify all zeros of a square polynomial system inside ``box``.

    Independent variable blocks are solved separately and recombined as
    products, which keeps suspended (tail-augmented) systems cheap.
    """
    components = list(components)
    box = tuple(box)
    if not components or len(components) != len(box):
        raise ValueError("square system and matching box required")
    blocks = _blocks(components)
    if blocks is None or len(blocks) == 1:
        return list(_solve_cached(tuple(components), tuple((b.lo, b.hi) for b in box), budget))
    variables = components[0].variables
    per_block = []
    for comp_idx, var_idx in blocks:
        sub_vars = tuple(variables[i] for i in var_idx)
        sub = tuple(components[c].with_variables(sub_vars) for c in comp_idx)
        sub_box = tuple((box[i].lo, box[i].hi) for i in var_idx)
        per_block.append((var_idx, _solve_cached(sub, sub_box, budget)))
    # a block without zeros rules out zeros of the whole system
    for var_idx, certs in per_block:
        if all(c.kind == "no_zero" for c in certs):
            lifted = []
            for c in certs:
                full = list(box)
                for pos, vi in enumerate(var_idx):
                    full[vi] = c.box[pos]
                lifted.append(Certificate(tuple(full), "no_zero", c.method + " (block)"))
            return lifted
    out: list[Certificate] = []
    unique_parts = []
    for var_idx, certs in per_block:
        unique_parts.append([c for c in certs if c.kind == "unique_zero"])
        for c in certs:
            if c.kind != "unique_zero":
                full = list(box)
                for pos, vi in enumerate(var_idx):
                    full[vi] = c.box[pos]
                out.append(Certificate(tuple(full), c.kind, c.method + " (block)"))
    for combo in product(*unique_parts):
        full = list(box)
        for (var_idx, _), cert in zip(per_block, combo):
            for pos, vi in enumerate(var_idx):
                full[vi] = cert.box[pos]
        out.insert(0, Certificate(tuple(full), "unique_zero", "krawczyk (product of blocks)"))
    return out


def certify_points(f: MultiPoly, box: Sequence[Interval], budget: int = BOX_BUDGET) -> list[Certificate]:
    """Certificates for the critical points of ``f`` (zeros of its gradient) in ``box``."""
    if not box:
        raise ValueError("empty box")
    if PARAM in f.variables:
        raise ValueError("specialise the deformation parameter before certifying")
    grad = f.jacobian(f.variables)
    certs = solve_system(grad, box, budget)
    uniques = sorted((c for c in certs if c.kind == "unique_zero"), key=lambda c: tuple(iv.lo for iv in c.box))
    rest = sorted((c for c in certs if c.kind != "unique_zero"), key=lambda c: (c.kind, tuple(iv.lo for iv in c.box)))
    return uniques + rest


# ---------------------------------------------------------------------------
# Hessian inertia


def berkowitz(matrix, zero, one):
    """Coefficients of det(lambda*I - A), highest degree first, division free."""
    n = len(matrix)
    if n == 0:
        return [one]
    coeffs = [one, zero - matrix[0][0]]
    for r in range(1, n):
        a = matrix[r][r]
        row = matrix[r][:r]
        col = [matrix[i][r] for i in range(r)]
        sub = [m[:r] for m in matrix[:r]]
        toeplitz = [one, zero - a]
        vec = col
        for _ in range(r):
            dot = zero
            for ri, vi in zip(row, vec):
                dot = dot + ri * vi
            toeplitz.append(zero - dot)
            vec = [_dot(sub_row, vec, zero) for sub_row in sub]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                if i - j < len(toeplitz) and j < len(coeffs):
                    acc = acc + toeplitz[i - j] * coeffs[j]
            new.append(acc)
        coeffs = new
    return coeffs


def _dot(a, b, zero):
    acc = zero
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def _variations(signs) -> int:
    nz = [s for s in signs if s]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def inertia_from_charpoly(coeffs: Sequence[Interval]) -> tuple[int, int, int]:
    """(n_pos, n_neg, n_zero) of a symmetric matrix from its interval char poly.

    Uses Descartes' rule, exact for real-rooted polynomials; straddling
    coefficients are enumerated over {-, 0, +} and the answer is accepted
    only if every consistent assignment agrees.
    """
    n = len(coeffs) - 1
    options = []
    for c in coeffs:
        if c.lo > 0:
            options.append((1,))
        elif c.hi < 0:
            options.append((-1,))
        elif c.lo == 0 and c.hi == 0:
            options.append((0,))
        else:
            options.append((-1, 0, 1))
    seen = set()
    for signs in product(*options):
        pos = _variations(signs)
        neg = _variations([s * (-1) ** (n - j) for j, s in enumerate(signs)])
        zero = 0
        for s in reversed(signs):
            if s:
                break
            zero += 1
        if pos + neg + zero == n:
            seen.add((pos, neg, zero))
    if len(seen) != 1:
        raise SignatureUndecided(f"inertia not determined by coefficient enclosures (candidates {sorted(seen)})")
    return seen.pop()


def _hessian_blocks(hess: list[list[MultiPoly]]) -> list[list[int]]:
    n = len(hess)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if not hess[i][j].is_zero():
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def hessian_signature(f: MultiPoly, location: Sequence[Interval]) -> tuple[int, int, int]:
    """Certified (n_pos, n_neg, n_zero) of Hess(f) over the box ``location``."""
    hess = f.hessian(f.variables)
    total = [0, 0, 0]
    zero, one = Interval(0), Interval(1)
    for block in _hessian_blocks(hess):
        mat = [[hess[i][j].eval_interval(location) for j in block] for i in block]
        sig = inertia_from_charpoly(berkowitz(mat, zero, one))
        for i in range(3):
            total[i] += sig[i]
    return tuple(total)


def hessian_signature_at(f: MultiPoly, pt: CriticalPoint) -> tuple[int, int, int]:
    return hessian_signature(f, pt.location)


def suspend_index(curve_index: int, s: int) -> int:
    if curve_index not in (0, 1, 2):
        raise ValueError("curve Morse index must be 0, 1 or 2")
    if s < 0:
        raise ValueError("s must be nonnegative")
    return curve_index + s


# ---------------------------------------------------------------------------
# aggregated report


@dataclass(frozen=True)
class MorseReport:
    germ: GermDescriptor
    t0: Fraction
    case_tag: str
    box: tuple[Interval, ...]
    closed_form: tuple[CriticalPoint, ...]
    oracle: tuple[CriticalPoint, ...]
    certificates: tuple[Certificate, ...]
    closed_form_matches_oracle: bool
    certified: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def count(self) -> int:
        return len(self.oracle)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(p.morse_index for p in self.oracle))

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "germ": format_code(self.germ),
            "case_tag": self.case_tag,
            "t0": str(self.t0),
            "box": [[repr(iv.lo), repr(iv.hi)] for iv in self.box],
            "count": self.count,
            "indices": list(self.indices),
            "certified": self.certified,
            "closed_form_matches_oracle": self.closed_form_matches_oracle,
            "certification_method": "interval bisection + Krawczyk operator; inertia by Descartes on interval char poly",
            "closed_form_points": [p.to_json() for p in self.closed_form],
            "oracle_points": [p.to_json() for p in self.oracle],
            "certificate_counts": {
                kind: sum(1 for c in self.certificates if c.kind == kind)
                for kind in ("unique_zero", "no_zero", "undecided")
            },
            "notes": list(self.notes),
        }


def _point_matches(pt: CriticalPoint, certs: Sequence[Certificate]) -> bool:
    mid = pt.midpoint
    hits = [c for c in certs if all(iv.lo <= m <= iv.hi for iv, m in zip(c.box, mid))]
    return len(hits) == 1


def morse_report(d: GermDescriptor, t0=None, half_width=DEFAULT_HALF_WIDTH, budget: int = BOX_BUDGET) -> MorseReport:
    fam = build_family(d)
    t0 = representative_t(fam) if t0 is None else Fraction(t0)
    f_t = family_at(fam, t0)
    closed = closed_form_points(fam, t0)
    dim = len(fam.spatial_variables)
    box = standard_box(dim, half_width)
    notes = []
    if any(not _box_contains(box, p.location) for p in closed):
        box = standard_box(dim, 2 * half_width)
        notes.append(f"box grown to half-width {2 * half_width} to contain closed-form points")
        log.warning("%s: %s", format_code(d), notes[-1])
    certs = certify_points(f_t, box, budget)
    uniques = [c for c in certs if c.kind == "unique_zero"]
    undecided = [c for c in certs if c.kind == "undecided"]
    oracle = []
    certified = not undecided
    for c in uniques:
        try:
            sig = hessian_signature(f_t, c.box)
        except SignatureUndecided:
            certified = False
            notes.append(f"inertia undecided at box {[(iv.lo, iv.hi) for iv in c.box]}")
            continue
        oracle.append(CriticalPoint(c.box, sig[1], sig, sig[2] == 0, "interval_solver"))
    if any(not p.certified for p in oracle + closed):
        certified = False
    matches = len(closed) == len(uniques) and all(_point_matches(p, uniques) for p in closed)
    if matches:
        closed_idx = sorted(p.morse_index for p in closed)
        matches = closed_idx == sorted(p.morse_index for p in oracle)
    return MorseReport(
        germ=d,
        t0=t0,
        case_tag=fam.case_tag,
        box=box,
        closed_form=tuple(closed),
        oracle=tuple(oracle),
        certificates=tuple(certs),
        closed_form_matches_oracle=matches,
        certified=certified,
        notes=tuple(notes),
    )
