"""Integer homology of finite cell complexes.

The chain complex is first shrunk by reduction pairs (a cell and a face with
incidence +-1, eliminated by one step of Gaussian elimination, which keeps
homology over Z), then the small remainder goes through Smith normal form.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, minimum_spanning_tree


def smith_diagonal(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors of an integer matrix, each dividing the next."""
    a = [list(map(int, row)) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        while True:
            # pivot: smallest nonzero |entry| in the remaining block
            best = None
            for i in range(r, rows):
                row = a[i]
                for j in range(c, cols):
                    v = row[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
                        if best[0] == 1:
                            break
                if best and best[0] == 1:
                    break
            if best is None:
                return _normalize(diag)
            _, pi, pj = best
            a[r], a[pi] = a[pi], a[r]
            for row in a:
                row[c], row[pj] = row[pj], row[c]
            p = a[r][c]
            done = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    q = a[i][c] // p
                    ri, rr = a[i], a[r]
                    for j in range(c, cols):
                        ri[j] -= q * rr[j]
                    if ri[c]:
                        done = False
            for j in range(c + 1, cols):
                if a[r][j]:
                    q = a[r][j] // p
                    for i in range(r, rows):
                        a[i][j] -= q * a[i][c]
                    if a[r][j]:
                        done = False
            if not done:
                continue
            # divisibility of the remaining block by the pivot
            bad = None
            for i in range(r + 1, rows):
                for j in range(c + 1, cols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is not None:
                for j in range(c, cols):
                    a[r][j] += a[bad][j]
                continue
            diag.append(abs(p))
            r += 1
            break
    return _normalize(diag)


def _normalize(diag: list[int]) -> list[int]:
    # enforce d_i | d_{i+1} (already true for the pivoting above, kept as a guard)
    d = sorted(diag)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            l = d[i] * d[j] // g
            d[i], d[j] = g, l
    return d


@dataclass(frozen=True)
class HomologyResult:
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]  # torsion coefficients of H_d
    euler: int
    reduced_sizes: tuple[int, ...]


class ChainComplex:
    """Free chain complex over Z given by sparse boundary maps.

    ``boundaries[d]`` (d >= 1) is a list, one entry per d-cell, of
    ``{face_index: coefficient}`` dictionaries.
    """

    def __init__(self, counts: Sequence[int], boundaries: Sequence[Sequence[dict]]):
        self.counts = list(counts)
        top = len(self.counts) - 1
        self.top = top
        self.bd: list[list[dict]] = [[]] + [[dict(b) for b in boundaries[d]] for d in range(1, top + 1)]
        for d in range(1, top + 1):
            if len(self.bd[d]) != self.counts[d]:
                raise ValueError(f"dimension {d}: {len(self.bd[d])} boundaries for {self.counts[d]} cells")
            for b in self.bd[d]:
                for face in b:
                    if not 0 <= face < self.counts[d - 1]:
                        raise ValueError(f"dimension {d}: face index {face} out of range")

    @property
    def euler(self) -> int:
        return sum((-1) ** d * c for d, c in enumerate(self.counts))

    def check_boundary_squared(self) -> bool:
        for d in range(2, self.top + 1):
            for b in self.bd[d]:
                acc: dict[int, int] = {}
                for face, c in b.items():
                    for ff, c2 in self.bd[d - 1][face].items():
                        acc[ff] = acc.get(ff, 0) + c * c2
                if any(acc.values()):
                    return False
        return True

    def homology(self) -> HomologyResult:
        top = self.top
        bd = [[dict(b) for b in level] for level in self.bd]
        alive = [[True] * c for c in self.counts]
        cob: list[list[set]] = [[set() for _ in range(c)] for c in self.counts]
        for d in range(1, top + 1):
            for cell, b in enumerate(bd[d]):
                for face in b:
                    cob[d - 1][face].add(cell)

        for d in range(top, 0, -1):
            low = d - 1
            heap = [(len(cob[low][s]), s) for s in range(self.counts[low]) if cob[low][s]]
            heapq.heapify(heap)
            while heap:
                size, sigma = heapq.heappop(heap)
                if not alive[low][sigma]:
                    continue
                cur = len(cob[low][sigma])
                if cur == 0:
                    continue
                if cur != size:
                    heapq.heappush(heap, (cur, sigma))
                    continue
                tau = None
                for cand in cob[low][sigma]:
                    if abs(bd[d][cand][sigma]) == 1 and (tau is None or len(bd[d][cand]) < len(bd[d][tau])):
                        tau = cand
                if tau is None:
                    continue
                touched = self._eliminate(bd, cob, alive, d, tau, sigma)
                for face in touched:
                    if alive[low][face] and cob[low][face]:
                        heapq.heappush(heap, (len(cob[low][face]), face))

        # remaining boundary matrices
        index = [[i for i, a in enumerate(alive[d]) if a] for d in range(top + 1)]
        sizes = tuple(len(ix) for ix in index)
        ranks = [0] * (top + 2)
        factors: list[list[int]] = [[] for _ in range(top + 2)]
        for d in range(1, top + 1):
            rows = {c: i for i, c in enumerate(index[d - 1])}
            mat = []
            nonzero = False
            for cell in index[d]:
                col = [0] * len(rows)
                for face, c in bd[d][cell].items():
                    col[rows[face]] = c
                    nonzero = True
                mat.append(col)
            if not nonzero:
                continue
            transposed = [list(r) for r in zip(*mat)] if mat else []
            diag = smith_diagonal(transposed)
            ranks[d] = len(diag)
            factors[d] = [x for x in diag if x > 1]
        betti = tuple(sizes[d] - ranks[d] - ranks[d + 1] for d in range(top + 1))
        torsion = tuple(tuple(factors[d + 1]) for d in range(top + 1))
        return HomologyResult(betti, torsion, self.euler, sizes)

    @staticmethod
    def _eliminate(bd, cob, alive, d, tau, sigma):
        """Remove the pair (sigma, tau) with <d tau, sigma> = +-1."""
        low = d - 1
        c = bd[d][tau][sigma]
        btau = bd[d][tau]
        touched = set(btau)
        for other in list(cob[low][sigma]):
            if other == tau:
                continue
            bo = bd[d][other]
            factor = bo[sigma] * c
            for face, val in btau.items():
                new = bo.get(face, 0) - factor * val
                if new:
                    if face not in bo:
                        cob[low][face].add(other)
                    bo[face] = new
                elif face in bo:
                    del bo[face]
                    cob[low][face].discard(other)
        for face in btau:
            cob[low][face].discard(tau)
        if d < len(bd) - 1:
            for rho in cob[d][tau]:
                del bd[d + 1][rho][tau]
        if low >= 1:
            for face in bd[low][sigma]:
                cob[low - 1][face].discard(sigma)
            bd[low][sigma] = {}
        cob[low][sigma] = set()
        bd[d][tau] = {}
        cob[d][tau] = set()
        alive[d][tau] = False
        alive[low][sigma] = False
        touched.discard(sigma)
        return touched


def homology_from_boundaries(counts: Sequence[int], boundaries: Sequence[Sequence[dict]]) -> HomologyResult:
    return ChainComplex(counts, boundaries).homology()


def _pair_lookup(a: np.ndarray, b: np.ndarray, values: np.ndarray, width: int):
    """Map (a, b) key pairs to values; returns a vectorised query function."""
    keys = a.astype(np.int64) * width + b
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]

    def query(qa, qb):
        want = qa.astype(np.int64) * width + qb
        pos = np.searchsorted(sorted_keys, want)
        if np.any(sorted_keys[np.minimum(pos, len(sorted_keys) - 1)] != want):
            raise KeyError("pair not present")
        return values[order[pos]]

    return query


def polyhedral_homology(
    n_vertices: int,
    edges: np.ndarray,
    face_ids: np.ndarray,
    face_edges: np.ndarray,
    face_signs: np.ndarray,
    n_faces: int,
) -> HomologyResult:
    """Homology (b_0, b_1, b_2) of a complex of dimension <= 2 given by incidence arrays.

    ``edges`` is (E, 2) with edge ``i`` oriented from ``edges[i, 0]`` to
    ``edges[i, 1]``; face incidences are parallel arrays ``face_ids``,
    ``face_edges``, ``face_signs``.  Large surface pieces are removed first by
    elementary collapses through free edges (in breadth-first order over the
    face adjacency graph) and a spanning forest of the 1-skeleton is
    contracted.  Both steps keep the integer homology.  The leftover goes to
    :class:`ChainComplex`.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    face_ids = np.asarray(face_ids, dtype=np.int64)
    face_edges = np.asarray(face_edges, dtype=np.int64)
    face_signs = np.asarray(face_signs, dtype=np.int64)
    V, E, F = int(n_vertices), len(edges), int(n_faces)
    euler = V - E + F

    removed_edge = np.zeros(E, dtype=bool)
    face_alive = np.ones(F, dtype=bool)
    if F:
        cof = np.bincount(face_edges, minlength=E)
        # face adjacency through edges lying on exactly two faces
        by_edge = np.argsort(face_edges, kind="stable")
        fe_sorted = face_edges[by_edge]
        starts = np.searchsorted(fe_sorted, np.arange(E))
        two = np.nonzero(cof == 2)[0]
        fa = face_ids[by_edge[starts[two]]]
        fb = face_ids[by_edge[starts[two] + 1]]
        inner = fa != fb
        fa, fb, shared = fa[inner], fb[inner], two[inner]
        # virtual root F joined to every face owning a free edge
        free_inc = np.nonzero(cof[face_edges] == 1)[0]
        root_face, first = np.unique(face_ids[free_inc], return_index=True)
        root_edge = face_edges[free_inc[first]]
        src = np.concatenate([fa, fb, np.full(len(root_face), F), root_face])
        dst = np.concatenate([fb, fa, root_face, np.full(len(root_face), F)])
        graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(F + 1, F + 1)).tocsr()
        order, pred = breadth_first_order(graph, F, directed=True, return_predecessors=True)
        reached = order[order != F]
        parent = pred[reached]
        via_root = parent == F
        removed_edge[root_edge[np.searchsorted(root_face, reached[via_root])]] = True
        if np.any(~via_root):
            lookup = _pair_lookup(np.concatenate([fa, fb]), np.concatenate([fb, fa]), np.concatenate([shared, shared]), F + 1)
            removed_edge[lookup(reached[~via_root], parent[~via_root])] = True
        face_alive[reached] = False

    # spanning forest of the remaining 1-skeleton
    kept = np.nonzero(~removed_edge)[0]
    ka, kb = edges[kept, 0], edges[kept, 1]
    if V == 0:
        return HomologyResult((0, 0, 0), ((), (), ()), 0, (0, 0, 0))
    skeleton = coo_matrix((np.ones(len(kept)), (ka, kb)), shape=(V, V)).tocsr()
    b0, _ = connected_components(skeleton, directed=False)
    tree = minimum_spanning_tree(skeleton).tocoo()
    in_tree = np.zeros(E, dtype=bool)
    if tree.nnz:
        lookup = _pair_lookup(np.minimum(ka, kb), np.maximum(ka, kb), kept, V)
        in_tree[lookup(np.minimum(tree.row, tree.col), np.maximum(tree.row, tree.col))] = True
    loops = np.nonzero(~removed_edge & ~in_tree)[0]

    # leftover complex: b0 points, loop edges with zero boundary, surviving faces
    loop_index = np.full(E, -1, dtype=np.int64)
    loop_index[loops] = np.arange(len(loops))
    alive_faces = np.nonzero(face_alive)[0]
    face_index = np.full(F, -1, dtype=np.int64)
    face_index[alive_faces] = np.arange(len(alive_faces))
    sel = face_alive[face_ids] & (loop_index[face_edges] >= 0) if F else np.zeros(0, dtype=bool)
    bd2 = [dict() for _ in range(len(alive_faces))]
    for f, e, c in zip(face_index[face_ids[sel]].tolist(), loop_index[face_edges[sel]].tolist(), face_signs[sel].tolist()):
        v = bd2[f].get(e, 0) + c
        if v:
            bd2[f][e] = v
        else:
            del bd2[f][e]
    counts = [int(b0), len(loops), len(alive_faces)]
    rest = ChainComplex(counts, [[], [{} for _ in loops], bd2]).homology()
    return HomologyResult(rest.betti, rest.torsion, euler, rest.reduced_sizes)
