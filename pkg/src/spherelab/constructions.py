"""Generators for spheres, balls and the gluing operations between them."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .complex_core import Facet, FacetHypergraph, HypergraphError, canonicalize, join


@dataclass(frozen=True)
class OrderedStackedBall:
    """Facets in stacking order; ``facets[k]`` is glued onto the union of
    ``facets[:k]`` along a single boundary ridge."""

    facets: tuple[Facet, ...]

    def __post_init__(self):
        object.__setattr__(self, "facets", tuple(tuple(sorted(f)) for f in self.facets))

    def __len__(self):
        return len(self.facets)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset().union(*self.facets)


@dataclass(frozen=True)
class ConstructionMetadata:
    apex: int | None = None
    base_facet: Facet | None = None
    partition: tuple[tuple[int, ...], ...] | None = None
    # Facets that came from the cross-polytope part of a gadget.
    cross_facets: tuple[Facet, ...] | None = None


def _lex_first(facets: Iterable[Facet]) -> Facet:
    return min(facets)


# -- basic spheres -----------------------------------------------------------

def simplex_boundary(d: int) -> FacetHypergraph:
    """Boundary of the (d+1)-simplex on ``0..d+1``."""
    if d < 0:
        raise ValueError("dimension must be non-negative")
    return canonicalize(combinations(range(d + 2), d + 1), n=d + 2)[0]


def cross_polytope_boundary(d: int) -> tuple[FacetHypergraph, dict[int, int]]:
    """(d+1)-fold join of S^0 with antipodal pairs ``(2i, 2i+1)``.

    Returns the sphere and its antipodal map ``v -> v ^ 1``.
    """
    if d < 0:
        raise ValueError("dimension must be non-negative")
    s0 = simplex_boundary(0)
    K = s0
    for _ in range(d):
        K = join(K, s0)
    return K, {v: v ^ 1 for v in range(K.n)}


def is_gale_facet(f: Sequence[int], n: int) -> bool:
    """Gale's evenness condition, block form: every maximal run of
    consecutive members of ``f`` that avoids both ends has even length."""
    members = set(f)
    v = 0
    while v < n:
        if v not in members:
            v += 1
            continue
        start = v
        while v < n and v in members:
            v += 1
        if start > 0 and v < n and (v - start) % 2:
            return False
    return True


def cyclic_polytope(d: int, n: int) -> FacetHypergraph:
    """Facet hypergraph of the cyclic d-polytope on ``n`` vertices (0-based)."""
    if d < 2:
        raise ValueError("cyclic polytopes need d >= 2")
    if n < d + 1:
        raise ValueError(f"need n >= d + 1, got d={d}, n={n}")
    facets = [f for f in combinations(range(n), d) if is_gale_facet(f, n)]
    return canonicalize(facets, n=n)[0]


def icosahedron_boundary() -> FacetHypergraph:
    # 0 top, 1..5 upper ring, 6..10 lower ring, 11 bottom
    tri = []
    for i in range(5):
        u, u1 = 1 + i, 1 + (i + 1) % 5
        l, l1 = 6 + i, 6 + (i + 1) % 5
        tri += [(0, u, u1), (u, u1, l), (u1, l, l1), (11, l, l1)]
    return canonicalize(tri, n=12)[0]


def torus_7() -> FacetHypergraph:
    """The 7-vertex triangulation of the torus."""
    tri = []
    for i in range(7):
        tri.append((i, (i + 1) % 7, (i + 3) % 7))
        tri.append((i, (i + 2) % 7, (i + 3) % 7))
    return canonicalize(tri, n=7)[0]


# -- stacked balls -----------------------------------------------------------

def stacked_ball_path(d_ball: int, n: int) -> OrderedStackedBall:
    """Consecutive windows ``{i, ..., i + d_ball}`` on ``n`` vertices."""
    if d_ball < 1 or n < d_ball + 1:
        raise ValueError(f"need d_ball >= 1 and n >= d_ball + 1, got {d_ball}, {n}")
    return OrderedStackedBall(tuple(tuple(range(i, i + d_ball + 1)) for i in range(n - d_ball)))


def _ridges(f: Facet) -> Iterable[Facet]:
    return combinations(f, len(f) - 1)


def validate_stacked_ball(seq: OrderedStackedBall | Sequence[Sequence[int]]) -> bool:
    """Check the stacking condition for the given order only.

    Each new facet must meet the union of the earlier ones in exactly one
    codimension-one face, and that face must lie in exactly one earlier facet
    (i.e. on the boundary so far).
    """
    facets = seq.facets if isinstance(seq, OrderedStackedBall) else tuple(tuple(sorted(f)) for f in seq)
    if not facets:
        return False
    sizes = {len(f) for f in facets}
    if len(sizes) != 1:
        raise ValueError("stacked ball facets must all have the same size")
    size = sizes.pop()
    ridge_count: Counter = Counter(_ridges(facets[0]))
    seen = [frozenset(facets[0])]
    for f in facets[1:]:
        fs = frozenset(f)
        meets = {fs & g for g in seen}
        maximal = [m for m in meets if not any(m < o for o in meets)]
        if len(maximal) != 1 or len(maximal[0]) != size - 1:
            return False
        ridge = tuple(sorted(maximal[0]))
        if ridge_count[ridge] != 1:
            return False
        ridge_count.update(_ridges(f))
        seen.append(fs)
    return True


def boundary_ridges(facets: Iterable[Sequence[int]]) -> list[Facet]:
    """Ridges lying in exactly one facet; raises if any lies in three or more."""
    count: Counter = Counter()
    for f in facets:
        count.update(_ridges(tuple(sorted(f))))
    bad = [r for r, c in count.items() if c > 2]
    if bad:
        raise HypergraphError(f"not a manifold-like ball: ridge {list(min(bad))} in {count[min(bad)]} facets")
    return sorted(r for r, c in count.items() if c == 1)


def ball_boundary(B: OrderedStackedBall | Iterable[Sequence[int]]) -> FacetHypergraph:
    facets = B.facets if isinstance(B, OrderedStackedBall) else list(B)
    return canonicalize(boundary_ridges(facets))[0]


# -- connected sums ----------------------------------------------------------

def _ascending_bijection(f1: Facet, f2: Facet) -> dict[int, int]:
    return dict(zip(sorted(f1), sorted(f2)))


def glue_map(n1: int, f1: Facet, K2: FacetHypergraph, f2: Facet,
             psi: Mapping[int, int] | None = None) -> dict[int, int]:
    """Where each vertex of ``K2`` lands in ``K1 #_psi K2``.

    Vertices of ``f2`` go to their preimage under ``psi``; the rest get fresh
    labels ``n1, n1 + 1, ...`` in increasing order.
    """
    f1, f2 = tuple(sorted(f1)), tuple(sorted(f2))
    if psi is None:
        psi = _ascending_bijection(f1, f2)
    if set(psi) != set(f1) or sorted(psi.values()) != list(f2):
        raise HypergraphError("psi must be a bijection from f1 onto f2")
    inverse = {b: a for a, b in psi.items()}
    out = {}
    fresh = n1
    for v in range(K2.n):
        if v in inverse:
            out[v] = inverse[v]
        else:
            out[v] = fresh
            fresh += 1
    return out


def connected_sum(K1: FacetHypergraph, f1: Sequence[int], K2: FacetHypergraph, f2: Sequence[int],
                  psi: Mapping[int, int] | None = None) -> FacetHypergraph:
    """``K1 #_psi K2``: remove ``f1`` and ``f2``, identify their vertices."""
    return _connected_sum(K1, f1, K2, f2, psi)[0]


def _connected_sum(K1, f1, K2, f2, psi=None):
    f1, f2 = tuple(sorted(f1)), tuple(sorted(f2))
    if f1 not in K1.facet_set:
        raise HypergraphError(f"{f1} is not a facet of the first sphere")
    if f2 not in K2.facet_set:
        raise HypergraphError(f"{f2} is not a facet of the second sphere")
    if len(f1) != len(f2):
        raise HypergraphError("glued facets must have the same size")
    where = glue_map(K1.n, f1, K2, f2, psi)
    facets = [f for f in K1.facets if f != f1]
    facets += [tuple(where[v] for v in f) for f in K2.facets if f != f2]
    n = K1.n + K2.n - len(f1)
    return canonicalize(facets, n=n)[0], where


def cd_plus(d: int) -> tuple[FacetHypergraph, ConstructionMetadata]:
    """Cross-polytope boundary with a simplex boundary glued on one facet."""
    if d < 2:
        raise ValueError("need d >= 2")
    C, antipode = cross_polytope_boundary(d)
    S = simplex_boundary(d)
    f = _lex_first(C.facets)
    g = _lex_first(S.facets)
    (apex_in_s,) = set(range(S.n)) - set(g)
    K, where = _connected_sum(C, f, S, g)
    base = tuple(sorted(antipode[v] for v in f))
    return K, ConstructionMetadata(apex=where[apex_in_s], base_facet=base)


def x_construction(d: int, k: int) -> tuple[FacetHypergraph, ConstructionMetadata]:
    """Iterated connected sum of copies of :func:`cd_plus` onto S^d.

    Each copy's base facet is glued onto the lexicographically first facet
    through the current apex, and the copy's apex becomes the new apex.
    """
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    X = simplex_boundary(d)
    apex = 0
    blocks = [tuple(range(X.n))]
    gadget, gmeta = cd_plus(d)
    for _ in range(k - 1):
        f = _lex_first(fc for fc in X.facets if apex in fc)
        n_before = X.n
        X, where = _connected_sum(X, f, gadget, gmeta.base_facet)
        apex = where[gmeta.apex]
        blocks.append(tuple(range(n_before, X.n)))
    return X, ConstructionMetadata(apex=apex, partition=tuple(blocks))


# -- single element extensions -----------------------------------------------

def single_element_extension(K: FacetHypergraph, B: OrderedStackedBall | Sequence[Sequence[int]],
                             w: int | None = None) -> FacetHypergraph:
    """Replace the stacked ball ``B`` inside ``K`` by the cone from ``w``
    over its boundary."""
    ball = B if isinstance(B, OrderedStackedBall) else OrderedStackedBall(tuple(B))
    if w is None:
        w = K.n
    if w != K.n:
        raise HypergraphError(f"new vertex must be labelled {K.n}, got {w}")
    missing = [f for f in ball.facets if f not in K.facet_set]
    if missing:
        raise HypergraphError(f"ball is not a subcomplex: {list(missing[0])} is not a facet")
    if not validate_stacked_ball(ball):
        raise HypergraphError("ball is not stacked in the given order")
    if ball.vertices != frozenset(range(K.n)):
        raise HypergraphError("ball does not span the vertex set")
    removed = set(ball.facets)
    facets = [f for f in K.facets if f not in removed]
    facets += [r + (w,) for r in boundary_ridges(ball.facets)]
    return canonicalize(facets, n=K.n + 1)[0]


# -- the gadgets built from the 21-vertex sphere -------------------------------

def ck_gadget(K21: FacetHypergraph, ghat: Sequence[int]) -> tuple[FacetHypergraph, ConstructionMetadata]:
    """Cross-polytope boundary C^3 glued to ``K21`` along ``ghat``."""
    ghat = tuple(sorted(ghat))
    if ghat not in K21.facet_set:
        raise HypergraphError(f"{ghat} is not a facet")
    C, antipode = cross_polytope_boundary(3)
    f = _lex_first(C.facets)
    K, _ = _connected_sum(C, f, K21, ghat)
    base = tuple(sorted(antipode[v] for v in f))
    cross = tuple(fc for fc in C.facets if fc != f)
    return K, ConstructionMetadata(base_facet=base, cross_facets=cross)


def y_construction(k: int, K21: FacetHypergraph | None = None,
                   ghat: Sequence[int] = (2, 3, 4, 5)) -> tuple[FacetHypergraph, ConstructionMetadata]:
    """Chain of ``k`` copies of the 21-vertex sphere joined through C^3 gadgets.

    The partition records the 21 vertices contributed by each copy.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if K21 is None:
        from .k21 import build_k21
        K21 = build_k21()
    ghat = tuple(sorted(ghat))
    gadget, gmeta = ck_gadget(K21, ghat)
    Y, base = K21, ghat
    blocks = [tuple(range(K21.n))]
    for _ in range(k - 1):
        n_before = Y.n
        Y, where = _connected_sum(Y, base, gadget, gmeta.base_facet)
        blocks.append(tuple(range(n_before, Y.n)))
        candidates = [tuple(sorted(where[v] for v in fc)) for fc in gmeta.cross_facets
                      if fc != gmeta.base_facet]
        base = min(candidates)
    return Y, ConstructionMetadata(base_facet=base, partition=tuple(blocks))
