"""Numerical verification of predicted Betti numbers by meshing the fibres.

The fibre on side ``+`` (resp. ``-``) is ``{f = +eta}`` (resp. ``{f = -eta}``)
inside the closed ball of radius ``eps``.  A reading is taken at two scales
and is called stable when both agree.  The finer scale halves the radius,
doubles the resolution, and shrinks the level by ``2**-D``, where ``D`` is
the largest weighted degree of a coordinate.  Quasi-homogeneity then keeps
the geometry of the fibre in the ball the same.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from milnorfibre.germ import GermDescriptor, build_germ, format_code, validate, weights
from milnorfibre.homology import polyhedral_homology
from milnorfibre.mesh import CellComplex, extract_level_set
from milnorfibre.poly import MultiPoly
from milnorfibre.predict import PoincarePolynomial, predict_table

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SIDES = ("plus", "minus")
DEFAULT_EPSILON = Fraction(1, 2)
DEFAULT_RESOLUTION = {2: 512, 3: 96}
MAX_REFINEMENTS = 2
WORKERS_ENV = "MILNORFIBRE_WORKERS"


class FibreSpecError(ValueError):
    pass


@dataclass(frozen=True)
class FibreSpec:
    polynomial: MultiPoly
    side: str
    epsilon: Fraction
    eta: Fraction
    resolution: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "eta", Fraction(self.eta))
        if self.side not in SIDES:
            raise FibreSpecError(f"side must be 'plus' or 'minus', got {self.side!r}")
        if self.epsilon <= 0:
            raise FibreSpecError("epsilon must be positive")
        if not 0 < self.eta <= self.epsilon / 8:
            raise FibreSpecError(f"need 0 < eta <= epsilon/8, got eta={self.eta}, epsilon={self.epsilon}")
        if int(self.resolution) != self.resolution or self.resolution < 16:
            raise FibreSpecError(f"resolution must be an integer >= 16, got {self.resolution}")
        if self.polynomial.nvars not in (2, 3):
            raise FibreSpecError(f"meshing needs 2 or 3 variables, got {self.polynomial.nvars}")

    @property
    def level(self) -> Fraction:
        return self.eta if self.side == "plus" else -self.eta

    @property
    def dim(self) -> int:
        return self.polynomial.nvars

    def to_json(self) -> dict:
        return {"epsilon": str(self.epsilon), "eta": str(self.eta), "resolution": self.resolution}


def mesh_fibre(spec: FibreSpec) -> CellComplex:
    """PL fibre ``{f = level} ∩ B_eps`` with exact vertex signs."""
    return extract_level_set(spec.polynomial, spec.level, spec.epsilon, spec.resolution)


@dataclass(frozen=True)
class BettiReport:
    betti: tuple[int, ...]
    euler: int
    params: dict
    stable: bool = True
    torsion: tuple[tuple[int, ...], ...] = ()
    readings: tuple["BettiReport", ...] = ()
    flagged: int = 0
    manifold: bool = True

    def __post_init__(self):
        if any(b < 0 for b in self.betti):
            raise ValueError("Betti numbers are nonnegative")
        if sum((-1) ** i * b for i, b in enumerate(self.betti)) != self.euler:
            raise ValueError(f"Euler characteristic {self.euler} disagrees with Betti numbers {self.betti}")

    @property
    def poincare(self) -> PoincarePolynomial:
        return PoincarePolynomial.from_betti(self.betti)

    def to_json(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "betti": list(self.betti),
            "poincare": str(self.poincare),
            "euler": self.euler,
            "torsion": [list(t) for t in self.torsion],
            "stable": self.stable,
            "flagged": self.flagged,
            "manifold": self.manifold,
            "params": self.params,
        }
        if self.readings:
            out["readings"] = [r.to_json() for r in self.readings]
        return out


def _manifold_ok(c: CellComplex) -> bool:
    """Curves: every vertex away from the sphere has exactly two neighbours."""
    if c.face_count or c.is_empty():
        return True
    deg = c.vertex_degrees()
    return bool(np.all(deg[~c.on_sphere] == 2) and np.all(deg[c.on_sphere] == 1))


def betti_numbers(c: CellComplex, length: int | None = None, params: dict | None = None) -> BettiReport:
    """Betti numbers over Z with torsion and the Euler cross-check.

    ``length`` pads the result to b_0..b_{length-1} (the fibre dimension plus one).
    """
    res = polyhedral_homology(len(c.vertices), c.edges, *c.face_incidence(), c.face_count)
    betti = list(res.betti)
    torsion = list(res.torsion)
    if length is not None:
        if any(betti[length:]):
            raise ValueError(f"homology above degree {length - 1}: {betti}")
        betti = (betti + [0] * length)[:length]
        torsion = (torsion + [()] * length)[:length]
    report = BettiReport(
        tuple(betti),
        c.euler,
        dict(params or {}),
        torsion=tuple(tuple(t) for t in torsion),
        flagged=c.flagged,
        manifold=_manifold_ok(c),
    )
    if sum((-1) ** i * b for i, b in enumerate(report.betti)) != res.euler:
        raise AssertionError("homology disagrees with the cell counts")
    return report


# ---------------------------------------------------------------------------
# germ-level verification


def scaling_degree(d: GermDescriptor) -> int:
    """Smallest integer D with every weight >= 1/D."""
    return max(math.ceil(1 / w) for w in weights(d).values())


def default_params(d: GermDescriptor, epsilon=DEFAULT_EPSILON) -> tuple[Fraction, Fraction, int]:
    dim = d.n + 1
    if dim not in DEFAULT_RESOLUTION:
        raise ValueError(f"{format_code(d)}: meshing needs n + 1 <= 3, got n = {d.n}")
    epsilon = Fraction(epsilon)
    D = scaling_degree(d)
    return epsilon, epsilon**D / 16, DEFAULT_RESOLUTION[dim]


def _reading(poly, side, epsilon, eta, resolution, length, refinements) -> BettiReport:
    report = None
    for _ in range(refinements + 1):
        spec = FibreSpec(poly, side, epsilon, eta, resolution)
        c = mesh_fibre(spec)
        report = betti_numbers(c, length, spec.to_json())
        if not c.flagged:
            return report
        log.warning("%d cells hide a sign change at resolution %d; refining", c.flagged, resolution)
        resolution *= 2
    return report


def verify_germ(
    d: GermDescriptor,
    side: str,
    epsilon=None,
    eta=None,
    resolution: int | None = None,
    refinements: int = MAX_REFINEMENTS,
) -> BettiReport:
    """Betti numbers of the fibre on ``side`` read at two scales."""
    validate(d)
    e0, h0, r0 = default_params(d)
    epsilon = Fraction(epsilon) if epsilon is not None else e0
    eta = Fraction(eta) if eta is not None else h0 * (epsilon / e0) ** scaling_degree(d)
    resolution = int(resolution) if resolution is not None else r0
    poly = build_germ(d)
    length = d.n + 1
    D = scaling_degree(d)
    coarse = _reading(poly, side, epsilon, eta, resolution, length, refinements)
    fine = _reading(poly, side, epsilon / 2, eta / 2**D, 2 * resolution, length, refinements)
    stable = coarse.betti == fine.betti and not coarse.flagged and not fine.flagged
    params = {
        "germ": format_code(d),
        "side": side,
        "epsilon": str(epsilon),
        "eta": str(eta),
        "resolution": resolution,
        "scaling_degree": D,
    }
    if not stable:
        log.warning("%s side %s: readings %s and %s disagree", format_code(d), side, coarse.betti, fine.betti)
    return BettiReport(
        coarse.betti,
        coarse.euler,
        params,
        stable=stable,
        torsion=coarse.torsion,
        readings=(coarse, fine),
        flagged=coarse.flagged + fine.flagged,
        manifold=coarse.manifold and fine.manifold,
    )


@dataclass(frozen=True)
class VerificationVerdict:
    germ: str
    status: str  # "match" | "mismatch" | "unresolved_explored"
    reports: dict
    predicted: dict
    notes: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.status != "mismatch"

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "germ": self.germ,
            "status": self.status,
            "exploratory": self.status == "unresolved_explored",
            "predicted": self.predicted,
            "observed": {side: str(r.poincare) for side, r in self.reports.items()},
            "reports": {side: r.to_json() for side, r in self.reports.items()},
            "notes": list(self.notes),
        }


def compare(d: GermDescriptor, sides: Sequence[str] = SIDES, **mesh_params) -> VerificationVerdict:
    """Mesh-verify the requested sides against the published prediction."""
    prediction = predict_table(d)
    reports = {side: verify_germ(d, side, **mesh_params) for side in sides}
    code = format_code(d)
    if not prediction.resolved:
        return VerificationVerdict(code, "unresolved_explored", reports, {"status": "unresolved"})
    expected = {"plus": prediction.beta_plus, "minus": prediction.beta_minus}
    predicted = {side: str(expected[side]) for side in sides}
    notes = []
    for side, r in reports.items():
        if not r.stable:
            notes.append(f"{side}: unstable readings {[list(x.betti) for x in r.readings]}")
        elif r.poincare != expected[side]:
            notes.append(f"{side}: observed {r.poincare}, predicted {expected[side]}")
        if any(r.torsion):
            notes.append(f"{side}: torsion {r.torsion}")
    return VerificationVerdict(code, "mismatch" if notes else "match", reports, predicted, tuple(notes))


def _compare_job(args):
    d, sides, params = args
    return compare(d, sides, **params)


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def compare_many(descriptors: Iterable[GermDescriptor], sides=SIDES, workers: int | None = None, **params):
    """Run :func:`compare` over many germs; results keep the input order."""
    jobs = [(d, tuple(sides), params) for d in descriptors]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [_compare_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_compare_job, jobs))


# ---------------------------------------------------------------------------
# SVG


def fibre_svg(c: CellComplex, epsilon, size: int = 480, title: str = "") -> str:
    """Static picture of a planar fibre inside its disk."""
    if c.ambient_dim != 2:
        raise ValueError("only planar fibres can be drawn")
    eps = float(epsilon)
    half = size / 2
    scale = (half - 10) / eps

    def xy(p):
        return f"{half + p[0] * scale:.3f},{half - p[1] * scale:.3f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f"<title>{title}</title>" if title else "",
        f'<circle cx="{half}" cy="{half}" r="{eps * scale:.3f}" fill="none" stroke="#888" stroke-dasharray="4 3"/>',
        '<path fill="none" stroke="#c0392b" stroke-width="1.5" d="',
    ]
    pts = c.vertices
    parts.append(" ".join(f"M{xy(pts[a])} L{xy(pts[b])}" for a, b in c.edges))
    parts.append('"/>')
    parts.append("</svg>")
    return "\n".join(p for p in parts if p) + "\n"


def plot_fibre(d: GermDescriptor, side: str, epsilon=None, eta=None, resolution: int | None = None) -> str:
    if d.n != 1:
        raise ValueError("plots are only available for plane curves (n = 1)")
    e0, h0, r0 = default_params(d)
    spec = FibreSpec(
        build_germ(d),
        side,
        Fraction(epsilon) if epsilon is not None else e0,
        Fraction(eta) if eta is not None else h0,
        int(resolution) if resolution is not None else r0,
    )
    return fibre_svg(mesh_fibre(spec), spec.epsilon, title=f"{format_code(d)} {side}")
