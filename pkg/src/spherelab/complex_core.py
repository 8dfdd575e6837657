"""Facet hypergraphs and the simplicial complexes they generate.

A complex is always presented by its facets.  Vertices are the integers
``0 .. n-1``, each facet is a strictly ascending tuple, and the facet family
is an antichain stored in lexicographic order.  Everything here is immutable.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

MAX_VERTICES = 128

Facet = tuple[int, ...]


class HypergraphError(ValueError):
    pass


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def vertices_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


@dataclass(frozen=True)
class FacetHypergraph:
    """A finite family of facets on the vertex set ``range(n)``.

    Use :func:`canonicalize` to build one from arbitrary input; the
    constructor only checks the canonical-form invariants.
    """

    n: int
    facets: tuple[Facet, ...]

    def __post_init__(self):
        if self.n > MAX_VERTICES:
            raise HypergraphError(f"{self.n} vertices exceeds the cap of {MAX_VERTICES}")
        prev = None
        for f in self.facets:
            if not f or any(a >= b for a, b in zip(f, f[1:])):
                raise HypergraphError(f"facet {f} is not strictly ascending")
            if f[0] < 0 or f[-1] >= self.n:
                raise HypergraphError(f"facet {f} has labels outside [0, {self.n})")
            if prev is not None and not prev < f:
                raise HypergraphError("facets are not in canonical order")
            prev = f

    def __len__(self):
        return len(self.facets)

    def __iter__(self):
        return iter(self.facets)

    def __contains__(self, facet) -> bool:
        return tuple(sorted(facet)) in self.facet_set

    @cached_property
    def facet_set(self) -> frozenset[Facet]:
        return frozenset(self.facets)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(mask_of(f) for f in self.facets)

    @property
    def is_empty(self) -> bool:
        return not self.facets

    @cached_property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    @cached_property
    def is_uniform(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1

    @cached_property
    def vertex_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for f in self.facets:
            for v in f:
                deg[v] += 1
        return tuple(deg)

    def relabel(self, perm: Sequence[int] | dict[int, int]) -> "FacetHypergraph":
        """Image under a permutation of ``range(n)``."""
        if sorted(perm[v] for v in range(self.n)) != list(range(self.n)):
            raise HypergraphError("relabelling must permute the vertex set")
        return canonicalize([[perm[v] for v in f] for f in self.facets], n=self.n)[0]

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "facets": [list(f) for f in self.facets]})

    def to_text(self) -> str:
        lines = [f"# n={self.n} d={self.dim}"]
        lines.extend(" ".join(map(str, f)) for f in self.facets)
        return "\n".join(lines) + "\n"


def empty_hypergraph() -> FacetHypergraph:
    return FacetHypergraph(0, ())


def canonicalize(raw_facets: Iterable[Iterable[int]], n: int | None = None,
                 dense_relabel: bool = False, strict: bool = False
                 ) -> tuple[FacetHypergraph, tuple[int, ...]]:
    """Normalise a raw family of vertex sets.

    Duplicates are merged and any set contained in another one is dropped
    (``strict=True`` raises instead).  With ``dense_relabel`` the surviving
    vertices are renumbered ``0..m-1`` in increasing order.

    Returns the hypergraph together with ``labels``, where ``labels[i]`` is
    the input label of output vertex ``i``.
    """
    sets = set()
    for raw in raw_facets:
        s = frozenset(raw)
        if not s:
            continue
        if min(s) < 0:
            raise HypergraphError("vertex labels must be non-negative")
        sets.add(s)
    if not sets:
        raise HypergraphError("no facets")

    # Larger sets first, so a set only needs checking against kept ones.
    kept: list[frozenset] = []
    for s in sorted(sets, key=len, reverse=True):
        if kept and len(s) < len(kept[0]) and any(s < k for k in kept):
            if strict:
                raise HypergraphError(f"{sorted(s)} is not maximal")
            continue
        kept.append(s)

    used = sorted(set().union(*kept))
    if dense_relabel:
        labels = tuple(used)
        index = {v: i for i, v in enumerate(labels)}
        facets = sorted(tuple(sorted(index[v] for v in s)) for s in kept)
        return FacetHypergraph(len(labels), tuple(facets)), labels

    size = used[-1] + 1 if n is None else n
    if used[-1] >= size:
        raise HypergraphError(f"label {used[-1]} outside [0, {size})")
    if len(used) != size:
        missing = sorted(set(range(size)) - set(used))[0]
        raise HypergraphError(f"uncovered vertex {missing}")
    facets = sorted(tuple(sorted(s)) for s in kept)
    return FacetHypergraph(size, tuple(facets)), tuple(range(size))


def hypergraph(raw_facets: Iterable[Iterable[int]], n: int | None = None) -> FacetHypergraph:
    """Shorthand for ``canonicalize(raw)[0]`` without relabelling."""
    return canonicalize(raw_facets, n=n)[0]


# -- faces -------------------------------------------------------------------

def faces(K: FacetHypergraph, dim: int) -> set[Facet]:
    """All faces of dimension ``dim`` (vertex sets of size ``dim + 1``)."""
    size = dim + 1
    if size == 0:
        return {()}
    out: set[Facet] = set()
    for f in K.facets:
        if len(f) >= size:
            out.update(combinations(f, size))
    return out


def all_faces(K: FacetHypergraph) -> list[set[Facet]]:
    """Faces indexed by dimension + 1, so ``all_faces(K)[0] == {()}``."""
    return [faces(K, d) for d in range(-1, K.dim + 1)]


@dataclass(frozen=True)
class FVector:
    """Face counts ``(f_-1, f_0, ..., f_d)``."""

    counts: tuple[int, ...]

    def __getitem__(self, dim: int) -> int:
        return self.counts[dim + 1]

    @property
    def dim(self) -> int:
        return len(self.counts) - 2

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** i * c for i, c in enumerate(self.counts[1:]))


def f_vector(K: FacetHypergraph) -> FVector:
    return FVector(tuple(len(s) for s in all_faces(K)))


def is_face(K: FacetHypergraph, face: Iterable[int]) -> bool:
    m = mask_of(face)
    return any(m & fm == m for fm in K.masks)


# -- links, joins, induced subcomplexes --------------------------------------

def link(K: FacetHypergraph, face: Iterable[int]) -> tuple[FacetHypergraph, tuple[int, ...]]:
    """Link of a face, densely relabelled; ``labels`` maps back to ``K``."""
    face = tuple(sorted(face))
    m = mask_of(face)
    rest = [tuple(v for v in f if v not in face) for f, fm in zip(K.facets, K.masks) if fm & m == m]
    if not rest:
        raise HypergraphError(f"{face} is not a face")
    if any(not r for r in rest):
        raise HypergraphError(f"{face} is a facet; its link is the empty complex")
    return canonicalize(rest, dense_relabel=True)


def join_facets(F1: Iterable[Iterable[int]], F2: Iterable[Iterable[int]]) -> list[Facet]:
    F1 = [tuple(f) for f in F1]
    F2 = [tuple(f) for f in F2]
    v1 = set().union(*F1)
    v2 = set().union(*F2)
    if v1 & v2:
        raise HypergraphError(f"join operands share vertices {sorted(v1 & v2)}")
    return [tuple(sorted(a + b)) for a in F1 for b in F2]


def join(H1: FacetHypergraph, H2: FacetHypergraph) -> FacetHypergraph:
    """Join, with the vertices of ``H2`` shifted up by ``H1.n``."""
    shifted = [tuple(v + H1.n for v in f) for f in H2.facets]
    return canonicalize(join_facets(H1.facets, shifted), n=H1.n + H2.n)[0]


def induced(K: FacetHypergraph, S: Iterable[int]) -> tuple[FacetHypergraph, tuple[int, ...]]:
    """Facets lying inside ``S``, densely relabelled.

    When nothing survives the empty hypergraph is returned (check
    ``result.is_empty``) rather than raising.
    """
    m = mask_of(S)
    keep = [f for f, fm in zip(K.facets, K.masks) if fm & ~m == 0]
    if not keep:
        return empty_hypergraph(), ()
    return canonicalize(keep, dense_relabel=True)


def remove_facet(K: FacetHypergraph, facet: Iterable[int]) -> FacetHypergraph:
    facet = tuple(sorted(facet))
    if facet not in K.facet_set:
        raise HypergraphError(f"{facet} is not a facet")
    return canonicalize([f for f in K.facets if f != facet], n=K.n)[0]


# -- edge degrees ------------------------------------------------------------

@dataclass(frozen=True)
class EdgeDegreeProfile:
    degrees: dict[tuple[int, int], int] = field(hash=False)
    epsilon: int


def edge_degrees(K: FacetHypergraph) -> EdgeDegreeProfile:
    deg: Counter = Counter()
    for f in K.facets:
        deg.update(combinations(f, 2))
    top = sorted(deg.values(), reverse=True)[:K.n]
    return EdgeDegreeProfile(dict(sorted(deg.items())), sum(top))


def epsilon(K: FacetHypergraph) -> int:
    """Sum of the ``n`` largest edge degrees (all of them if fewer edges)."""
    return edge_degrees(K).epsilon


# -- file formats ------------------------------------------------------------

def parse_text(text: str) -> FacetHypergraph:
    n = None
    raw = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body, _, comment = line.partition("#")
        if not body.strip():
            head = comment.strip()
            if head.startswith("n=") and n is None and not raw:
                try:
                    n = int(head.split()[0][2:])
                except ValueError:
                    raise HypergraphError(f"line {lineno}: bad header {line!r}") from None
            continue
        try:
            verts = [int(tok) for tok in body.split()]
        except ValueError:
            raise HypergraphError(f"line {lineno}: expected integers, got {body.strip()!r}") from None
        if any(v < 0 for v in verts):
            raise HypergraphError(f"line {lineno}: negative label")
        if any(a >= b for a, b in zip(verts, verts[1:])):
            raise HypergraphError(f"line {lineno}: labels must be strictly ascending")
        raw.append(verts)
    return canonicalize(raw, n=n)[0]


def parse_json(text: str) -> FacetHypergraph:
    data = json.loads(text)
    if not isinstance(data, dict) or "facets" not in data:
        raise HypergraphError('expected an object with a "facets" key')
    return canonicalize(data["facets"], n=data.get("n"))[0]


def load(path) -> FacetHypergraph:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return parse_json(text)
    return parse_text(text)


def dump(K: FacetHypergraph, path, fmt: str = "text") -> None:
    with open(path, "w") as fh:
        fh.write(K.to_json() + "\n" if fmt == "json" else K.to_text())


def neighborly_facet_count(n: int) -> int:
    """Facet count of a 2-neighborly 3-sphere on ``n`` vertices."""
    return comb(n - 1, 2) - 1
