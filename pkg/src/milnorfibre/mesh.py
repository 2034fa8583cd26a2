"""Piecewise-linear level sets of polynomials inside a closed ball.

Sample points live on a half-step lattice over ``[-eps, eps]^dim``: integer
coordinates ``h`` in ``[0, 2R]`` stand for ``eps * (h - R) / R``.  Even ``h``
are grid corners, odd ``h`` are face and cell centres.  The sign of
``f - level`` is decided in exact rational arithmetic at every sample point
the extraction looks at: a vectorised float pass with a rigorous error bound
settles almost all of them and the rest go through ``Fraction`` evaluation.
A value of exactly zero counts as positive.

Extraction splits every active cell into simplices (four triangles around
the centre of a square, 24 tetrahedra around the centre of a cube, fanned
over the face centres), so the output is a manifold triangulation of the
level set with no ambiguous cases left.  The result is then clipped to the
ball along the straight pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from milnorfibre.poly import MultiPoly

_UNIT_ROUNDOFF = 2.0**-53


@dataclass
class CellComplex:
    """A polyhedral complex of dimension <= 2 with integer boundary data.

    Vertices carry coordinates, edges are stored low-id first, and faces are
    vertex cycles.  The orientation of an edge runs from its lower to its
    higher vertex id; a face is oriented by its cycle order.
    """

    ambient_dim: int
    vertices: np.ndarray
    edges: np.ndarray
    faces: list[np.ndarray] = field(default_factory=list)
    on_sphere: np.ndarray | None = None
    flagged: int = 0

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, self.ambient_dim)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.faces = [np.atleast_2d(np.asarray(f, dtype=np.int64)) for f in self.faces if len(f)]
        if self.on_sphere is None:
            self.on_sphere = np.zeros(len(self.vertices), dtype=bool)
        if len(self.edges):
            if self.edges.min() < 0 or self.edges.max() >= len(self.vertices):
                raise ValueError("edge references a vertex out of range")
            if np.any(self.edges[:, 0] >= self.edges[:, 1]):
                raise ValueError("edges must be stored as (low, high) with distinct ends")

    @property
    def dimension(self) -> int:
        if self.face_count:
            return 2
        if len(self.edges):
            return 1
        return 0 if len(self.vertices) else -1

    @property
    def face_count(self) -> int:
        return sum(len(f) for f in self.faces)

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), self.face_count

    @property
    def euler(self) -> int:
        v, e, f = self.counts
        return v - e + f

    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def edge_boundaries(self) -> list[dict]:
        return [{int(a): -1, int(b): 1} for a, b in self.edges]

    def face_incidence(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Parallel arrays (face, edge, sign) listing every face side."""
        if not self.face_count:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z
        nv = max(len(self.vertices), 1)
        keys = self.edges[:, 0] * nv + self.edges[:, 1]
        order = np.argsort(keys)
        sorted_keys = keys[order]
        fids, eids, signs = [], [], []
        offset = 0
        for block in self.faces:
            a = block
            b = np.roll(block, -1, axis=1)
            want = np.minimum(a, b) * nv + np.maximum(a, b)
            pos = np.searchsorted(sorted_keys, want)
            if np.any(sorted_keys[np.minimum(pos, len(sorted_keys) - 1)] != want):
                raise ValueError("face side is not a listed edge")
            fids.append(np.repeat(offset + np.arange(len(block)), block.shape[1]))
            eids.append(order[pos].ravel())
            signs.append(np.where(a < b, 1, -1).ravel())
            offset += len(block)
        return np.concatenate(fids), np.concatenate(eids), np.concatenate(signs)

    def face_boundaries(self) -> list[dict]:
        """For each face, ``{edge index: +-1}`` following its cycle."""
        out: list[dict] = [dict() for _ in range(self.face_count)]
        for f, e, c in zip(*(a.tolist() for a in self.face_incidence())):
            v = out[f].get(e, 0) + c
            if v:
                out[f][e] = v
            else:
                del out[f][e]
        return out

    def chain_data(self) -> tuple[list[int], list[list[dict]]]:
        counts = list(self.counts)
        boundaries = [[], self.edge_boundaries(), self.face_boundaries()]
        while len(counts) > 1 and counts[-1] == 0:
            counts.pop()
            boundaries.pop()
        return counts, boundaries

    def check_boundary_squared(self) -> bool:
        f, e, c = self.face_incidence()
        if not len(f):
            return True
        nv = len(self.vertices)
        rows = np.concatenate([f, f])
        cols = np.concatenate([self.edges[e, 0], self.edges[e, 1]])
        vals = np.concatenate([-c, c])
        keys = rows * nv + cols
        uniq, inv = np.unique(keys, return_inverse=True)
        sums = np.bincount(inv.ravel(), weights=vals, minlength=len(uniq))
        return bool(np.all(sums == 0))

    def incidence_in_range(self) -> bool:
        nv = len(self.vertices)
        ok = all(len(f) == 0 or (f.min() >= 0 and f.max() < nv) for f in self.faces)
        return ok and (not len(self.edges) or (self.edges.min() >= 0 and self.edges.max() < nv))

    def vertex_degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=len(self.vertices))


# ---------------------------------------------------------------------------
# exact signs on the half-step lattice


@dataclass(frozen=True)
class Lattice:
    eps: Fraction
    resolution: int
    dim: int

    @property
    def size(self) -> int:
        return 2 * self.resolution + 1

    def coords(self, h: np.ndarray) -> np.ndarray:
        return float(self.eps) * (np.asarray(h, dtype=float) - self.resolution) / self.resolution

    def exact_coord(self, h: int) -> Fraction:
        return self.eps * (int(h) - self.resolution) / self.resolution


def _float_value(poly: MultiPoly, coords) -> tuple[np.ndarray, np.ndarray]:
    """Float value and sum of absolute term values, broadcasting over coords."""
    val = 0.0
    mag = 0.0
    for exps, c in poly.terms.items():
        term = float(c)
        for x, e in zip(coords, exps):
            if e:
                term = term * x**e
        val = val + term
        mag = mag + np.abs(term)
    return val, mag


def _error_factor(poly: MultiPoly) -> float:
    deg = max((sum(e) for e in poly.terms), default=0)
    # coordinates carry one rounding each, every product and sum one more;
    # the factor 4 is headroom on top of the first-order bound
    return 4.0 * (2 * deg + len(poly.terms) + 4) * _UNIT_ROUNDOFF


class SignOracle:
    """Exact sign of ``poly - level`` at lattice points."""

    def __init__(self, poly: MultiPoly, level: Fraction, lattice: Lattice):
        if poly.nvars != lattice.dim:
            raise ValueError(f"polynomial has {poly.nvars} variables, lattice is {lattice.dim}-dimensional")
        self.poly = poly
        self.level = Fraction(level)
        self.lattice = lattice
        self._shifted = poly - MultiPoly.constant(self.level, poly.variables)
        self._factor = _error_factor(self._shifted)
        self.exact_evaluations = 0

    def _settle(self, coords, values, mags, locate) -> np.ndarray:
        bound = mags * self._factor + 1e-300
        pos = values >= 0
        unsure = np.abs(values) <= bound
        if np.any(unsure):
            for where in zip(*np.nonzero(unsure)):
                h = locate(where)
                point = [self.lattice.exact_coord(c) for c in h]
                pos[where] = self._shifted.evaluate(point) >= 0
                self.exact_evaluations += 1
        return pos

    def grid(self, parity: int):
        """Values and exact signs on the full grid of even (0) or odd (1) lattice points.

        Returns ``(values, positive)`` arrays of shape ``(m,)*dim``.
        """
        R = self.lattice.resolution
        h_axis = np.arange(parity, 2 * R + 1, 2)
        axis = self.lattice.coords(h_axis)
        dim = self.lattice.dim
        coords = [axis.reshape([-1 if i == j else 1 for j in range(dim)]) for i in range(dim)]
        values, mags = _float_value(self._shifted, coords)
        shape = (len(h_axis),) * dim
        values = np.broadcast_to(values, shape).astype(float)
        mags = np.broadcast_to(mags, shape).astype(float)
        pos = self._settle(coords, values, mags, lambda idx: tuple(h_axis[i] for i in idx))
        return values, pos

    def points(self, h: np.ndarray):
        """Values and exact signs at an (N, dim) array of lattice points."""
        h = np.asarray(h, dtype=np.int64).reshape(-1, self.lattice.dim)
        coords = [self.lattice.coords(h[:, i]) for i in range(self.lattice.dim)]
        values, mags = _float_value(self._shifted, coords)
        values = np.broadcast_to(values, (len(h),)).astype(float)
        mags = np.broadcast_to(mags, (len(h),)).astype(float)
        pos = self._settle(coords, values, mags, lambda idx: tuple(h[idx[0]]))
        return values, pos


# ---------------------------------------------------------------------------
# extraction helpers


def _crossings(keys_a, keys_b, val_a, val_b, pos_a, coords_of):
    """Unique crossing points on lattice segments, keyed by their end points.

    Returns (ids, positions): ``ids[i]`` numbers the crossing on segment i.
    """
    lo = np.minimum(keys_a, keys_b)
    hi = np.maximum(keys_a, keys_b)
    seg_key = lo * np.int64(1 << 31) + hi
    uniq, first, ids = np.unique(seg_key, return_index=True, return_inverse=True)
    # interpolate on each unique segment, always from its positive end
    a_pos = pos_a[first]
    ka = np.where(a_pos, keys_a[first], keys_b[first])
    kb = np.where(a_pos, keys_b[first], keys_a[first])
    va = np.where(a_pos, val_a[first], val_b[first])
    vb = np.where(a_pos, val_b[first], val_a[first])
    va = np.maximum(va, 0.0)
    vb = np.minimum(vb, 0.0)
    denom = va - vb
    s = np.where(denom > 0, va / np.where(denom > 0, denom, 1.0), 0.5)
    pa = coords_of(ka)
    pb = coords_of(kb)
    return ids.reshape(-1), pa + s[:, None] * (pb - pa)


def _sphere_cut(p_in, p_out, radius):
    """Point where the straight segment from inside to outside meets the sphere."""
    d = p_out - p_in
    a = np.einsum("ij,ij->i", d, d)
    b = 2 * np.einsum("ij,ij->i", p_in, d)
    c = np.einsum("ij,ij->i", p_in, p_in) - radius**2
    disc = np.maximum(b * b - 4 * a * c, 0.0)
    s = np.where(a > 0, (-b + np.sqrt(disc)) / (2 * np.where(a > 0, a, 1.0)), 0.0)
    s = np.clip(s, 0.0, 1.0)
    return p_in + s[:, None] * d


def _compact(ambient, positions, on_sphere, edges, faces, flagged):
    """Drop unused vertices and renumber; edges come out as sorted unique pairs."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    used = [edges.ravel()] + [f.ravel() for f in faces]
    used_ids = np.unique(np.concatenate(used)) if any(len(u) for u in used) else np.zeros(0, np.int64)
    remap = np.full(len(positions), -1, dtype=np.int64)
    remap[used_ids] = np.arange(len(used_ids))
    edges = remap[edges]
    edges = np.sort(edges, axis=1)
    edges = edges[edges[:, 0] != edges[:, 1]]
    edges = np.unique(edges, axis=0) if len(edges) else edges
    faces = [remap[f] for f in faces if len(f)]
    return CellComplex(ambient, positions[used_ids], edges, faces, on_sphere[used_ids], flagged)


# ---------------------------------------------------------------------------
# dimension 2


def _extract_2d(oracle: SignOracle, radius: float) -> CellComplex:
    lat = oracle.lattice
    R, M = lat.resolution, lat.size
    cv, cp = oracle.grid(0)
    mv, mp = oracle.grid(1)

    corners = [cp[:-1, :-1], cp[1:, :-1], cp[1:, 1:], cp[:-1, 1:]]
    n_pos = sum(c.astype(np.int8) for c in corners)
    active = (n_pos > 0) & (n_pos < 4)
    flagged = int(np.count_nonzero(~active & (mp != (n_pos == 4))))
    ii, jj = np.nonzero(active)
    if len(ii) == 0:
        return _compact(2, np.zeros((0, 2)), np.zeros(0, bool), np.zeros((0, 2)), [], flagged)

    def key(hx, hy):
        return hx * M + hy

    def coords_of(k):
        return np.stack([lat.coords(k // M), lat.coords(k % M)], axis=1)

    offsets = [(0, 0), (1, 0), (1, 1), (0, 1)]
    ck = [key(2 * (ii + dx), 2 * (jj + dy)) for dx, dy in offsets]
    cval = [cv[ii + dx, jj + dy] for dx, dy in offsets]
    cpos = [cp[ii + dx, jj + dy] for dx, dy in offsets]
    mk = key(2 * ii + 1, 2 * jj + 1)
    mval = mv[ii, jj]
    mpos = mp[ii, jj]

    # triangles (centre, c_q, c_{q+1})
    tk = [np.concatenate([mk] * 4), np.concatenate(ck), np.concatenate(ck[1:] + ck[:1])]
    tv = [np.concatenate([mval] * 4), np.concatenate(cval), np.concatenate(cval[1:] + cval[:1])]
    tp = [np.concatenate([mpos] * 4), np.concatenate(cpos), np.concatenate(cpos[1:] + cpos[:1])]
    mixed = ~((tp[0] == tp[1]) & (tp[1] == tp[2]))
    tk = [a[mixed] for a in tk]
    tv = [a[mixed] for a in tv]
    tp = [a[mixed] for a in tp]
    T = len(tk[0])
    # each mixed triangle has exactly two sign-changing sides
    sides = [(0, 1), (1, 2), (2, 0)]
    sa, sb, va, vb, pa, owner, slot = [], [], [], [], [], [], []
    for q, (a, b) in enumerate(sides):
        change = tp[a] != tp[b]
        idx = np.nonzero(change)[0]
        sa.append(tk[a][idx]); sb.append(tk[b][idx])
        va.append(tv[a][idx]); vb.append(tv[b][idx])
        pa.append(tp[a][idx]); owner.append(idx)
    sa, sb = np.concatenate(sa), np.concatenate(sb)
    va, vb = np.concatenate(va), np.concatenate(vb)
    pa, owner = np.concatenate(pa), np.concatenate(owner)
    ids, positions = _crossings(sa, sb, va, vb, pa, coords_of)
    order = np.argsort(owner, kind="stable")
    pairs = ids[order].reshape(T, 2)

    # clip to the disk
    inside = np.einsum("ij,ij->i", positions, positions) <= radius**2
    n_base = len(positions)
    ein = inside[pairs]
    both = ein[:, 0] & ein[:, 1]
    one = ein[:, 0] ^ ein[:, 1]
    keep = pairs[both]
    cut_pairs = pairs[one]
    flip = ~ein[one][:, 0]
    inner = np.where(flip, cut_pairs[:, 1], cut_pairs[:, 0])
    outer = np.where(flip, cut_pairs[:, 0], cut_pairs[:, 1])
    cut_pos = _sphere_cut(positions[inner], positions[outer], radius)
    cut_ids = n_base + np.arange(len(inner))
    all_pos = np.concatenate([positions, cut_pos])
    on_sphere = np.concatenate([np.zeros(n_base, bool), np.ones(len(inner), bool)])
    edges = np.concatenate([keep, np.stack([inner, cut_ids], axis=1)])
    return _compact(2, all_pos, on_sphere, edges, [], flagged)


# ---------------------------------------------------------------------------
# dimension 3

# tetrahedron vertex order: 0 body centre, 1 face centre, 2 and 3 edge ends
_TET_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _tet_table():
    """Sign pattern -> triangles, each given as three tetrahedron edges."""
    edge_id = {e: i for i, e in enumerate(_TET_EDGES)}

    def eid(a, b):
        return edge_id[(min(a, b), max(a, b))]

    table = {}
    for pattern in range(16):
        bits = [(pattern >> v) & 1 for v in range(4)]
        positive = [v for v in range(4) if bits[v]]
        negative = [v for v in range(4) if not bits[v]]
        if len(positive) in (0, 4):
            table[pattern] = []
        elif len(positive) in (1, 3):
            lone = positive[0] if len(positive) == 1 else negative[0]
            others = [v for v in range(4) if v != lone]
            table[pattern] = [[eid(lone, o) for o in others]]
        else:
            p1, p2 = positive
            n1, n2 = negative
            quad = [eid(p1, n1), eid(p1, n2), eid(p2, n2), eid(p2, n1)]
            table[pattern] = [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]]
    return table


_TET_TABLE = _tet_table()

# cube corners as bit offsets and the six faces as corner cycles
_CORNERS = [(dx, dy, dz) for dz in (0, 1) for dy in (0, 1) for dx in (0, 1)]
_FACES = [
    (0, [0, 2, 6, 4]), (0, [1, 3, 7, 5]),  # x = const
    (1, [0, 1, 5, 4]), (1, [2, 3, 7, 6]),  # y = const
    (2, [0, 1, 3, 2]), (2, [4, 5, 7, 6]),  # z = const
]


def _extract_3d(oracle: SignOracle, radius: float) -> CellComplex:
    lat = oracle.lattice
    R, M = lat.resolution, lat.size
    cv, cp = oracle.grid(0)

    corner_pos = [cp[dx:R + dx, dy:R + dy, dz:R + dz] for dx, dy, dz in _CORNERS]
    n_pos = sum(c.astype(np.int8) for c in corner_pos)
    del corner_pos
    active = (n_pos > 0) & (n_pos < 8)
    ii, jj, kk = np.nonzero(active)
    # body centres of inactive cells are only used to flag hidden pieces
    bv_all, bp_all = oracle.grid(1)
    flagged = int(np.count_nonzero(~active & (bp_all != (n_pos == 8))))
    if len(ii) == 0:
        return _compact(3, np.zeros((0, 3)), np.zeros(0, bool), np.zeros((0, 2)), [], flagged)

    def key(hx, hy, hz):
        return (hx * M + hy) * M + hz

    def coords_of(k):
        return np.stack([lat.coords(k // (M * M)), lat.coords((k // M) % M), lat.coords(k % M)], axis=1)

    ck = [key(2 * (ii + dx), 2 * (jj + dy), 2 * (kk + dz)) for dx, dy, dz in _CORNERS]
    cvals = [cv[ii + dx, jj + dy, kk + dz] for dx, dy, dz in _CORNERS]
    cposs = [cp[ii + dx, jj + dy, kk + dz] for dx, dy, dz in _CORNERS]
    bk = key(2 * ii + 1, 2 * jj + 1, 2 * kk + 1)
    bval = bv_all[ii, jj, kk]
    bpos = bp_all[ii, jj, kk]

    # face centres: exact sign where the face is mixed, corner sign otherwise
    fk, fval, fpos = [], [], []
    for axis, cyc in _FACES:
        h = np.stack([2 * ii + 1, 2 * jj + 1, 2 * kk + 1], axis=1)
        side = _CORNERS[cyc[0]][axis]
        h[:, axis] = 2 * ((ii, jj, kk)[axis] + side)
        fk.append(key(h[:, 0], h[:, 1], h[:, 2]))
        cnt = sum(cposs[c].astype(np.int8) for c in cyc)
        uniform = (cnt == 0) | (cnt == 4)
        # a uniform face keeps its corners' sign; the corner mean is a value
        # with that sign for interpolation along the spokes
        val = sum(cvals[c] for c in cyc) / 4
        pos = cnt == 4
        mixed = ~uniform
        if np.any(mixed):
            v, p = oracle.points(h[mixed])
            val[mixed] = v
            pos = pos.copy()
            pos[mixed] = p
        fval.append(val)
        fpos.append(pos)

    tets_k, tets_v, tets_p = [[], [], [], []], [[], [], [], []], [[], [], [], []]
    for f, (axis, cyc) in enumerate(_FACES):
        for q in range(4):
            a, b = cyc[q], cyc[(q + 1) % 4]
            for slot, (k_, v_, p_) in enumerate(
                [(bk, bval, bpos), (fk[f], fval[f], fpos[f]), (ck[a], cvals[a], cposs[a]), (ck[b], cvals[b], cposs[b])]
            ):
                tets_k[slot].append(k_)
                tets_v[slot].append(v_)
                tets_p[slot].append(p_)
    tk = [np.concatenate(x) for x in tets_k]
    tv = [np.concatenate(x) for x in tets_v]
    tp = [np.concatenate(x) for x in tets_p]
    pattern = sum(tp[v].astype(np.int64) << v for v in range(4))
    mixed = (pattern != 0) & (pattern != 15)
    tk = [x[mixed] for x in tk]
    tv = [x[mixed] for x in tv]
    tp = [x[mixed] for x in tp]
    pattern = pattern[mixed]

    # crossing points on every sign-changing tetrahedron edge
    n_tet = len(pattern)
    edge_ids = np.full((n_tet, 6), -1, dtype=np.int64)
    sa, sb, va, vb, pa, rows, cols = [], [], [], [], [], [], []
    for e, (a, b) in enumerate(_TET_EDGES):
        idx = np.nonzero(tp[a] != tp[b])[0]
        sa.append(tk[a][idx]); sb.append(tk[b][idx])
        va.append(tv[a][idx]); vb.append(tv[b][idx])
        pa.append(tp[a][idx]); rows.append(idx); cols.append(np.full(len(idx), e))
    sa, sb = np.concatenate(sa), np.concatenate(sb)
    va, vb = np.concatenate(va), np.concatenate(vb)
    pa = np.concatenate(pa)
    ids, positions = _crossings(sa, sb, va, vb, pa, coords_of)
    edge_ids[np.concatenate(rows), np.concatenate(cols)] = ids

    tris = []
    for pat, triangles in _TET_TABLE.items():
        if not triangles:
            continue
        sel = np.nonzero(pattern == pat)[0]
        if not len(sel):
            continue
        for tri in triangles:
            tris.append(edge_ids[sel][:, tri])
    tris = np.concatenate(tris) if tris else np.zeros((0, 3), np.int64)
    return _clip_surface(positions, tris, radius, flagged)


def _clip_surface(positions, tris, radius, flagged) -> CellComplex:
    n_base = len(positions)
    inside = np.einsum("ij,ij->i", positions, positions) <= radius**2
    # surface edges
    sides = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    sides = np.sort(sides, axis=1)
    uniq, inv = np.unique(sides[:, 0] * n_base + sides[:, 1], return_inverse=True)
    inv = inv.reshape(3, -1).T  # per triangle: edge (0,1), (1,2), (2,0)
    ea = uniq // n_base
    eb = uniq % n_base
    ein = inside[ea] & inside[eb]
    ecut = inside[ea] ^ inside[eb]
    # cut point per crossing surface edge
    cut_edges = np.nonzero(ecut)[0]
    p_in = np.where(inside[ea[cut_edges]], ea[cut_edges], eb[cut_edges])
    p_out = np.where(inside[ea[cut_edges]], eb[cut_edges], ea[cut_edges])
    cut_pos = _sphere_cut(positions[p_in], positions[p_out], radius)
    cut_id = np.full(len(uniq), -1, dtype=np.int64)
    cut_id[cut_edges] = n_base + np.arange(len(cut_edges))
    all_pos = np.concatenate([positions, cut_pos]) if len(cut_pos) else positions
    on_sphere = np.concatenate([np.zeros(n_base, bool), np.ones(len(cut_edges), bool)])

    tin = inside[tris]
    count = tin.sum(axis=1)
    faces = [tris[count == 3]]
    # one corner inside: triangle (v, cut on v->next, cut on prev->v)
    one = np.nonzero(count == 1)[0]
    if len(one):
        r = np.argmax(tin[one], axis=1)
        v = tris[one, r]
        e_next = inv[one, r]  # side (r, r+1)
        e_prev = inv[one, (r + 2) % 3]  # side (r+2, r)
        faces.append(np.stack([v, cut_id[e_next], cut_id[e_prev]], axis=1))
    # two corners inside: quad (v_r, v_{r+1}, cut on r+1->out, cut on out->r)
    two = np.nonzero(count == 2)[0]
    if len(two):
        out = np.argmin(tin[two], axis=1)
        r = (out + 1) % 3
        r1 = (out + 2) % 3
        va = tris[two, r]
        vb = tris[two, r1]
        e1 = inv[two, r1]  # side (r1, out)
        e2 = inv[two, out]  # side (out, r)
        faces.append(np.stack([va, vb, cut_id[e1], cut_id[e2]], axis=1))
    faces = [f for f in faces if len(f)]
    edges = []
    for f in faces:
        k = f.shape[1]
        edges.append(np.stack([f, np.roll(f, -1, axis=1)], axis=2).reshape(-1, 2))
    edges = np.concatenate(edges) if edges else np.zeros((0, 2), np.int64)
    return _compact(3, all_pos, on_sphere, edges, faces, flagged)


def extract_level_set(poly: MultiPoly, level, eps, resolution: int) -> CellComplex:
    """PL approximation of ``{poly = level}`` inside the closed ball of radius eps."""
    eps = Fraction(eps)
    lattice = Lattice(eps, int(resolution), poly.nvars)
    oracle = SignOracle(poly, Fraction(level), lattice)
    if lattice.dim == 2:
        return _extract_2d(oracle, float(eps))
    if lattice.dim == 3:
        return _extract_3d(oracle, float(eps))
    raise ValueError(f"meshing supports dimensions 2 and 3, got {lattice.dim}")
