"""Combinatorial sanity checks and integer homology.

None of this recognises spheres in dimension 3.  A complex passing
:func:`manifold_check_3d` with the homology of ``S^3`` is a homology
3-sphere; that is as far as these checks go.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Sequence

from .complex_core import FacetHypergraph, HypergraphError, f_vector, faces, link

MAX_HOMOLOGY_CELLS = 200_000


def _ridge_counts(K: FacetHypergraph) -> Counter:
    counts: Counter = Counter()
    for f in K.facets:
        counts.update(combinations(f, len(f) - 1))
    return counts


def is_pure(K: FacetHypergraph, d: int) -> bool:
    return bool(K.facets) and all(len(f) == d + 1 for f in K.facets)


def is_pseudomanifold(K: FacetHypergraph, d: int, with_boundary: bool = False) -> bool:
    """Pure of dimension ``d`` with every ridge in exactly two facets
    (one or two when ``with_boundary``)."""
    if not is_pure(K, d):
        return False
    allowed = (1, 2) if with_boundary else (2,)
    return all(c in allowed for c in _ridge_counts(K).values())


def is_connected(K: FacetHypergraph) -> bool:
    """Connectivity of the facet-ridge graph (facets adjacent across a shared ridge)."""
    if not K.facets:
        return False
    by_ridge: dict = {}
    for i, f in enumerate(K.facets):
        for r in combinations(f, len(f) - 1):
            by_ridge.setdefault(r, []).append(i)
    adj = [[] for _ in K.facets]
    for group in by_ridge.values():
        for i in group:
            adj[i].extend(group)
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(K.facets)


def euler_characteristic(K: FacetHypergraph) -> int:
    return f_vector(K).euler_characteristic


def _is_cycle(K: FacetHypergraph) -> bool:
    if not is_pure(K, 1) or K.n < 3 or len(K) != K.n:
        return False
    return all(d == 2 for d in K.vertex_degrees) and is_connected(K)


def is_sphere_lowdim(K: FacetHypergraph, d: int) -> bool:
    """Exact sphere recognition for ``d <= 2``."""
    if d >= 3:
        raise ValueError("dimension 3 and up: use manifold_check_3d")
    if d == 0:
        return K.n == 2 and K.facets == ((0,), (1,))
    if d == 1:
        return _is_cycle(K)
    if not (is_pseudomanifold(K, 2) and is_connected(K) and euler_characteristic(K) == 2):
        return False
    return all(_is_cycle(link(K, (v,))[0]) for v in range(K.n))


def manifold_check_3d(K: FacetHypergraph) -> bool:
    """Closed combinatorial 3-manifold test: pure, pseudomanifold, connected,
    ``chi = 0`` and every vertex link a 2-sphere."""
    if not (is_pseudomanifold(K, 3) and is_connected(K) and euler_characteristic(K) == 0):
        return False
    return all(is_sphere_lowdim(link(K, (v,))[0], 2) for v in range(K.n))


def is_ball_lowdim(K: FacetHypergraph, d: int) -> bool:
    """Necessary conditions for a ``d``-ball: pseudomanifold with boundary,
    connected, ``chi = 1`` and trivial reduced homology."""
    if not (is_pseudomanifold(K, d, with_boundary=True) and is_connected(K)):
        return False
    return euler_characteristic(K) == 1 and homology(K).is_trivial


def is_k_neighborly(K: FacetHypergraph, k: int) -> bool:
    return len(faces(K, k - 1)) == comb(K.n, k)


def neighborly3_face_check(K: FacetHypergraph) -> bool:
    """``f_2 = 2 C(f_0 - 1, 2) - 2`` and ``f_3 = C(f_0 - 1, 2) - 1``."""
    fv = f_vector(K)
    if fv.dim != 3:
        return False
    m = comb(fv[0] - 1, 2)
    return fv[2] == 2 * m - 2 and fv[3] == m - 1


def star_face_counts(K: FacetHypergraph, v: int) -> tuple[int, int]:
    """Numbers of triangles and tetrahedra of ``K`` containing ``v``."""
    tets = [f for f in K.facets if v in f]
    tris = {t for f in tets for t in combinations(f, 3) if v in t}
    return len(tris), len(tets)


# -- homology ----------------------------------------------------------------

@dataclass(frozen=True)
class HomologyProfile:
    """Reduced integer homology; ``betti[i]`` and ``torsion[i]`` for dimension ``i``."""

    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    @property
    def is_trivial(self) -> bool:
        return not any(self.betti) and not any(self.torsion)

    def is_sphere(self, d: int) -> bool:
        expect = tuple(1 if i == d else 0 for i in range(len(self.betti)))
        return self.betti == expect and not any(self.torsion)

    def to_dict(self) -> dict:
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion]}


def _dense_invariant_factors(rows: list[list[int]]) -> list[int]:
    """Nonzero Smith invariant factors of a small dense integer matrix."""
    A = [r[:] for r in rows if any(r)]
    if not A:
        return []
    m, n = len(A), len(A[0])
    out = []
    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        for r in A:
            r[t], r[j] = r[j], r[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    for r in A:
                        r[j] -= q * r[t]
                if A[t][j]:
                    done = False
            if done:
                # the pivot must divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
                if bad is None:
                    break
                A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
                continue
            # move a smaller remainder into the pivot position
            best = None
            for i in range(t, m):
                if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                    best = (abs(A[i][t]), i, "r")
            for j in range(t, n):
                if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                    best = (abs(A[t][j]), j, "c")
            _, k, kind = best
            if kind == "r":
                A[t], A[k] = A[k], A[t]
            else:
                for r in A:
                    r[t], r[k] = r[k], r[t]
        out.append(abs(A[t][t]))
        t += 1
    return out


def invariant_factors(columns: Sequence[dict[int, int]], nrows: int) -> list[int]:
    """Nonzero invariant factors of a sparse integer matrix given by columns.

    Unit pivots are eliminated sparsely (each contributes a factor 1); the
    leftover block goes through a dense Smith normal form.
    """
    cols = [dict(c) for c in columns if c]
    row_index: dict[int, set[int]] = {}
    for j, c in enumerate(cols):
        for i in c:
            row_index.setdefault(i, set()).add(j)
    alive = set(range(len(cols)))
    units = 0
    progress = True
    while progress:
        progress = False
        for j in sorted(alive, key=lambda j: (len(cols[j]), j)):
            if j not in alive:
                continue
            c = cols[j]
            if not c:
                alive.discard(j)
                continue
            r = next((i for i in sorted(c) if c[i] in (1, -1)), None)
            if r is None:
                continue
            u = c[r]
            for k in list(row_index[r]):
                if k == j:
                    continue
                ck = cols[k]
                q = ck[r] * u
                for i, a in c.items():
                    val = ck.get(i, 0) - q * a
                    if val:
                        if i not in ck:
                            row_index.setdefault(i, set()).add(k)
                        ck[i] = val
                    elif i in ck:
                        del ck[i]
                        row_index[i].discard(k)
                if not ck:
                    alive.discard(k)
            for i in c:
                row_index[i].discard(j)
            alive.discard(j)
            units += 1
            progress = True
    rest = sorted(j for j in alive if cols[j])
    if not rest:
        return [1] * units
    rows = sorted({i for j in rest for i in cols[j]})
    dense = [[cols[j].get(i, 0) for j in rest] for i in rows]
    return [1] * units + sorted(_dense_invariant_factors(dense))


def boundary_columns(lower: Sequence[tuple], upper: Sequence[tuple]) -> list[dict[int, int]]:
    """Columns of the simplicial boundary map from ``upper`` faces to ``lower``."""
    index = {f: i for i, f in enumerate(lower)}
    cols = []
    for f in upper:
        col = {}
        for k in range(len(f)):
            col[index[f[:k] + f[k + 1:]]] = -1 if k % 2 else 1
        cols.append(col)
    return cols


def homology(K: FacetHypergraph, order: Sequence[Sequence[tuple]] | None = None) -> HomologyProfile:
    """Reduced homology over the integers.

    ``order`` optionally fixes the face ordering in each dimension (index
    ``i`` holds the ``(i-1)``-faces); the answer does not depend on it.
    """
    if order is None:
        order = [sorted(faces(K, d)) for d in range(-1, K.dim + 1)]
    total = sum(len(x) for x in order)
    if total > MAX_HOMOLOGY_CELLS:
        raise HypergraphError(f"{total} faces exceeds the homology cap of {MAX_HOMOLOGY_CELLS}")
    top = K.dim
    ranks = [0] * (top + 2)
    factors: list[list[int]] = [[] for _ in range(top + 2)]
    # boundary from dimension i to i-1; order[i + 1] lists the i-faces
    for i in range(0, top + 1):
        inv = invariant_factors(boundary_columns(order[i], order[i + 1]), len(order[i]))
        ranks[i] = len(inv)
        factors[i] = [x for x in inv if x > 1]
    betti = []
    torsion = []
    for i in range(0, top + 1):
        betti.append(len(order[i + 1]) - ranks[i] - ranks[i + 1])
        torsion.append(tuple(sorted(factors[i + 1])))
    return HomologyProfile(tuple(betti), tuple(torsion))


def sphere_report(K: FacetHypergraph) -> dict:
    """All checks relevant to a claimed neighborly 3-sphere."""
    h = homology(K)
    fv = f_vector(K)
    return {
        "manifold3": manifold_check_3d(K),
        "homology_sphere": h.is_sphere(3),
        "homology": h.to_dict(),
        "neighborly": is_k_neighborly(K, 2),
        "dehn_sommerville": neighborly3_face_check(K),
        "f_vector": list(fv.counts),
    }


def check_complex(K: FacetHypergraph, d: int | None = None) -> dict[str, bool]:
    """Sphere checks appropriate to the dimension; keys stable across calls."""
    d = K.dim if d is None else d
    out = {
        "pure": is_pure(K, d),
        "pseudomanifold": is_pseudomanifold(K, d),
        "connected": is_connected(K),
        "euler": euler_characteristic(K) == (2 if d % 2 == 0 else 0),
        "homology": homology(K).is_sphere(d),
    }
    if d <= 2:
        out["links"] = is_sphere_lowdim(K, d)
    elif d == 3:
        out["links"] = manifold_check_3d(K)
    else:
        # links of vertices are (d-1)-dimensional homology spheres
        out["links"] = all(homology(link(K, (v,))[0]).is_sphere(d - 1)
                           for v in range(K.n))
    return out
