"""Exact and randomized solvers on facet hypergraphs.

All exact searches work on Python integers used as vertex bitsets.  They are
deterministic: ties are broken by vertex label, so the same instance always
yields the same witness.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .complex_core import FacetHypergraph, mask_of, vertices_of

OPTIMAL = "optimal"
UPPER_BOUND_ONLY = "upper_bound_only"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Budget:
    """Wall-clock milliseconds and/or a node cap; ``None`` means unlimited."""

    ms: float | None = None
    nodes: int | None = None


class BudgetExhausted(Exception):
    pass


class _Clock:
    __slots__ = ("deadline", "node_cap", "nodes", "start")

    def __init__(self, budget: Budget | None):
        budget = budget or Budget()
        self.start = time.perf_counter()
        self.deadline = None if budget.ms is None else self.start + budget.ms / 1000.0
        self.node_cap = budget.nodes
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.node_cap is not None and self.nodes > self.node_cap:
            raise BudgetExhausted
        if self.deadline is not None and not self.nodes & 255 and time.perf_counter() > self.deadline:
            raise BudgetExhausted

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start


@dataclass(frozen=True)
class SolverCertificate:
    """Outcome of an exact search.

    ``status == "optimal"`` means ``lower_bound == value`` was proven by an
    exhausted search; ``"upper_bound_only"`` means only the witness is
    trustworthy.
    """

    kind: str
    witness: tuple | dict | None
    value: int | None
    status: str
    nodes_explored: int
    elapsed: float
    lower_bound: int | None = None
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.witness, dict):
            d["witness"] = {str(k): v for k, v in sorted(self.witness.items())}
        elif self.witness is not None:
            d["witness"] = list(self.witness)
        return d


def _popcount(x: int) -> int:
    return x.bit_count()


def _lowest(x: int) -> int:
    return (x & -x).bit_length() - 1


# -- transversals ------------------------------------------------------------

def is_transversal(H: FacetHypergraph, T: Iterable[int]) -> bool:
    t = mask_of(T)
    return all(f & t for f in H.masks)


def is_independent(H: FacetHypergraph, S: Iterable[int]) -> bool:
    s = mask_of(S)
    return not any(f & s == f for f in H.masks)


def _greedy_hitting_set(masks: Sequence[int]) -> int:
    chosen = 0
    left = list(masks)
    while left:
        deg: dict[int, int] = {}
        for r in left:
            while r:
                low = r & -r
                deg[low] = deg.get(low, 0) + 1
                r ^= low
        best = max(deg, key=lambda b: (deg[b], -b))
        chosen |= best
        left = [r for r in left if not r & best]
    return chosen


def _lower_bound(uncovered: list[int]) -> int:
    """max(disjoint packing size, degree bound).

    Pairwise disjoint facets each need their own vertex; and ``k`` vertices
    can hit at most the sum of the ``k`` largest residual degrees.
    """
    used = 0
    pack = 0
    deg: dict[int, int] = {}
    for r in sorted(uncovered, key=_popcount):
        if not r & used:
            used |= r
            pack += 1
        while r:
            low = r & -r
            deg[low] = deg.get(low, 0) + 1
            r ^= low
    need = len(uncovered)
    k = 0
    for d in sorted(deg.values(), reverse=True):
        need -= d
        k += 1
        if need <= 0:
            break
    return max(pack, k)


class _HittingSetSearch:
    def __init__(self, masks: Sequence[int], clock: _Clock):
        self.masks = list(masks)
        self.clock = clock
        self.best = _greedy_hitting_set(self.masks)
        self.best_size = _popcount(self.best)

    def run(self):
        self._node(0, 0, self.masks)

    def _node(self, chosen: int, count: int, uncovered: list[int]):
        self.clock.tick()
        # facets reduced to one admissible vertex force it
        while True:
            forced = 0
            for r in uncovered:
                if not r & (r - 1):
                    forced |= r
            if not forced:
                break
            chosen |= forced
            count += _popcount(forced)
            if count >= self.best_size:
                return
            uncovered = [r for r in uncovered if not r & forced]
        if not uncovered:
            self.best, self.best_size = chosen, count
            return
        if count + _lower_bound(uncovered) >= self.best_size:
            return

        pivot = min(uncovered, key=_popcount)
        deg = {}
        for v in vertices_of(pivot):
            b = 1 << v
            deg[v] = sum(1 for r in uncovered if r & b)
        order = sorted(deg, key=lambda v: (-deg[v], v))
        excluded = 0
        for v in order:
            b = 1 << v
            child = []
            for r in uncovered:
                if r & b:
                    continue
                r &= ~excluded
                if not r:
                    break
                child.append(r)
            else:
                self._node(chosen | b, count + 1, child)
                if count + 1 >= self.best_size:
                    return
            excluded |= b


def min_hitting_set(n: int, masks: Sequence[int], budget: Budget | None = None) -> SolverCertificate:
    """Minimum transversal of an arbitrary family of vertex bitsets."""
    masks = [m for m in masks]
    clock = _Clock(budget)
    if any(m == 0 for m in masks):
        return SolverCertificate("transversal", None, None, INFEASIBLE, 0, 0.0)
    if not masks:
        return SolverCertificate("transversal", (), 0, OPTIMAL, 0, 0.0, lower_bound=0)
    search = _HittingSetSearch(masks, clock)
    root_lb = _lower_bound(masks)
    try:
        search.run()
        status, lb = OPTIMAL, search.best_size
    except BudgetExhausted:
        status, lb = UPPER_BOUND_ONLY, root_lb
    witness = vertices_of(search.best)
    return SolverCertificate("transversal", witness, len(witness), status, clock.nodes,
                             clock.elapsed, lower_bound=lb)


def transversal_number(H: FacetHypergraph, budget: Budget | None = None) -> SolverCertificate:
    """Exact transversal number by branch and bound.

    Branches on an uncovered facet with the fewest admissible vertices; the
    i-th branch takes its i-th vertex and forbids the earlier ones.
    """
    return min_hitting_set(H.n, H.masks, budget)


def independence_number(H: FacetHypergraph, budget: Budget | None = None) -> SolverCertificate:
    cert = transversal_number(H, budget)
    if cert.value is None:
        return SolverCertificate("independent_set", None, None, cert.status,
                                 cert.nodes_explored, cert.elapsed)
    S = tuple(v for v in range(H.n) if v not in set(cert.witness))
    lb = None if cert.lower_bound is None else H.n - cert.lower_bound
    # value is a lower bound on alpha unless optimal; lb is an upper bound
    return SolverCertificate("independent_set", S, len(S), cert.status, cert.nodes_explored,
                             cert.elapsed, lower_bound=len(S), notes={"upper_bound": lb})


# -- colorings ---------------------------------------------------------------

def is_proper_coloring(H: FacetHypergraph, coloring: Mapping[int, int] | Sequence[int]) -> bool:
    if not isinstance(coloring, Mapping):
        coloring = dict(enumerate(coloring))
    if any(v not in coloring for v in range(H.n)):
        return False
    for f in H.facets:
        if len({coloring[v] for v in f}) == 1:
            return False
    return True


class _ColoringSearch:
    """Backtracking m-coloring with propagation.

    Whenever a facet has all but one vertex assigned and those share a color,
    that color is removed from the remaining vertex's domain.
    """

    def __init__(self, n: int, masks: Sequence[int], m: int, clock: _Clock):
        self.n, self.masks, self.m, self.clock = n, list(masks), m, clock
        self.incident = [[] for _ in range(n)]
        for f in self.masks:
            for v in vertices_of(f):
                self.incident[v].append(f)
        self.degree = [len(x) for x in self.incident]

    def solve(self) -> list[int] | None:
        color = [-1] * self.n
        dom = [(1 << self.m) - 1] * self.n
        cls = [0] * self.m
        return self._dfs(color, dom, cls, 0)

    def _assign(self, v, c, color, dom, cls, assigned):
        queue = [(v, c)]
        while queue:
            v, c = queue.pop()
            if color[v] >= 0:
                if color[v] != c:
                    return None
                continue
            if not dom[v] >> c & 1:
                return None
            color[v] = c
            dom[v] = 1 << c
            cls[c] |= 1 << v
            assigned |= 1 << v
            for f in self.incident[v]:
                un = f & ~assigned
                if not un:
                    if f & cls[c] == f:
                        return None
                elif not un & (un - 1):
                    rest = f ^ un
                    if rest & cls[c] == rest:
                        u = _lowest(un)
                        dom[u] &= ~(1 << c)
                        if not dom[u]:
                            return None
                        if not dom[u] & (dom[u] - 1):
                            queue.append((u, _lowest(dom[u])))
        return assigned

    def _dfs(self, color, dom, cls, assigned):
        self.clock.tick()
        free = [v for v in range(self.n) if color[v] < 0]
        if not free:
            return color
        v = min(free, key=lambda u: (_popcount(dom[u]), -self.degree[u], u))
        used = 0
        for c in range(self.m):
            if cls[c]:
                used |= 1 << c
        candidates = dom[v] & used
        fresh = dom[v] & ~used
        if fresh:
            candidates |= fresh & -fresh
        for c in range(self.m):
            if not candidates >> c & 1:
                continue
            color2, dom2, cls2 = color[:], dom[:], cls[:]
            got = self._assign(v, c, color2, dom2, cls2, assigned)
            if got is None:
                continue
            found = self._dfs(color2, dom2, cls2, got)
            if found is not None:
                return found
        return None


def find_coloring(H: FacetHypergraph, m: int, budget: Budget | None = None) -> list[int] | None:
    """A proper ``m``-coloring as a list indexed by vertex, or ``None``.

    Raises :class:`BudgetExhausted` if the budget runs out first.
    """
    if any(len(f) == 1 for f in H.facets):
        return None
    if m < 1:
        return None
    return _ColoringSearch(H.n, H.masks, m, _Clock(budget)).solve()


def two_colorable(H: FacetHypergraph, budget: Budget | None = None) -> dict[int, int] | None:
    coloring = find_coloring(H, 2, budget)
    return None if coloring is None else dict(enumerate(coloring))


def chromatic_number(H: FacetHypergraph, budget: Budget | None = None) -> SolverCertificate:
    """Smallest ``m`` admitting a proper coloring, trying ``m = 1, 2, ...``."""
    clock = _Clock(budget)
    if any(len(f) == 1 for f in H.facets):
        return SolverCertificate("coloring", None, None, INFEASIBLE, 0, 0.0)
    proven = 1
    for m in range(1, H.n + 1):
        search = _ColoringSearch(H.n, H.masks, m, clock)
        try:
            coloring = search.solve()
        except BudgetExhausted:
            fallback = greedy_coloring_upper_bound(H)
            return SolverCertificate("coloring", dict(enumerate(fallback)), max(fallback) + 1,
                                     UPPER_BOUND_ONLY, clock.nodes, clock.elapsed, lower_bound=proven)
        if coloring is not None:
            return SolverCertificate("coloring", dict(enumerate(coloring)), m, OPTIMAL,
                                     clock.nodes, clock.elapsed, lower_bound=m)
        proven = m + 1
    raise AssertionError("unreachable: n colors always suffice without singleton facets")


def greedy_coloring_upper_bound(H: FacetHypergraph) -> list[int]:
    """First-fit coloring in label order (no search)."""
    color = [-1] * H.n
    incident = [[] for _ in range(H.n)]
    for f in H.facets:
        for v in f:
            incident[v].append(f)
    for v in range(H.n):
        c = 0
        while any(all(color[u] == c for u in f if u != v) for f in incident[v]):
            c += 1
        color[v] = c
    return color


def greedy_chromatic(H: FacetHypergraph, budget: Budget | None = None,
                     check_bound: bool = True) -> SolverCertificate:
    """Color by repeatedly removing a maximum independent set.

    Removing a class deletes every facet that touches it; the remainder keeps
    only facets lying entirely in the surviving vertices.  If a sub-search
    runs out of budget, the best transversal found so far still yields an
    independent class (maximal, not necessarily maximum); the certificate
    then says ``upper_bound_only``.
    """
    clock = _Clock(budget)
    if any(len(f) == 1 for f in H.facets):
        return SolverCertificate("coloring", None, None, INFEASIBLE, 0, 0.0)
    alive = (1 << H.n) - 1
    classes = []
    exact = True
    nodes = 0
    while alive:
        masks = [f for f in H.masks if f & alive == f]
        remaining_ms = None
        if budget is not None and budget.ms is not None:
            remaining_ms = max(1.0, budget.ms - 1000 * clock.elapsed)
        sub = min_hitting_set(H.n, masks, Budget(remaining_ms, budget.nodes if budget else None))
        nodes += sub.nodes_explored
        exact &= sub.status == OPTIMAL
        S = alive & ~mask_of(sub.witness)
        classes.append(vertices_of(S))
        alive &= ~S
    coloring = {v: i for i, cls in enumerate(classes) for v in cls}
    notes = {"classes": [len(c) for c in classes], "maximum_independent_sets": exact}
    bound = None
    if H.is_uniform and H.facets:
        d = len(H.facets[0]) - 1
        if d >= 3 and len(H) <= (d + 1) * H.n ** math.ceil(d / 2):
            bound = chromatic_upper_bound(H.n, d)
            notes["iteration_bound"] = bound
            if check_bound and exact and len(classes) > bound:
                raise AssertionError(f"{len(classes)} colors exceeds the iteration bound {bound}")
    return SolverCertificate("coloring", coloring, len(classes), OPTIMAL if exact else UPPER_BOUND_ONLY,
                             nodes, clock.elapsed, notes=notes)


# -- probabilistic bounds ----------------------------------------------------

def alteration_constant(d: int, c: float) -> float:
    """beta_{d,c} = d / ((1+d)^((d+1)/d) c^(1/d))."""
    return d / ((1 + d) ** ((d + 1) / d) * c ** (1 / d))


def alteration_bound(n: int, d: int, c: float, k: float) -> float:
    """Guaranteed expected independent-set size ``beta_{d,c} n^((d+1-k)/d)``."""
    return alteration_constant(d, c) * n ** ((d + 1 - k) / d)


def optimal_sampling_probability(n: int, d: int, c: float, k: float) -> float:
    return (c * (d + 1) * n ** (k - 1)) ** (-1 / d)


@dataclass(frozen=True)
class AlterationParams:
    d: int
    c: float
    k: float
    seed: int = 0
    p: float | None = None

    def probability(self, n: int) -> float:
        p = optimal_sampling_probability(n, self.d, self.c, self.k) if self.p is None else self.p
        if not 0 <= p <= 1:
            raise ValueError(f"sampling probability {p} outside [0, 1]")
        return p


def random_independent_set(H: FacetHypergraph, params: AlterationParams,
                           rng: np.random.Generator | None = None) -> tuple[int, ...]:
    """Sample each vertex with probability ``p``, then delete the lowest
    vertex of every facet still inside the sample (in facet order)."""
    if not H.is_uniform:
        raise ValueError("random_independent_set needs a uniform hypergraph")
    p = params.probability(H.n)
    if rng is None:
        rng = np.random.default_rng(params.seed)
    keep = rng.random(H.n) < p
    if H.facets:
        arr = _facet_array(H)
        inside = np.flatnonzero(keep[arr].all(axis=1))
        for i in inside:
            f = arr[i]
            if keep[f].all():
                keep[f[0]] = False
    return tuple(int(v) for v in np.flatnonzero(keep))


_ARRAYS: dict[int, tuple[FacetHypergraph, np.ndarray]] = {}


def _facet_array(H: FacetHypergraph) -> np.ndarray:
    hit = _ARRAYS.get(id(H))
    if hit is None or hit[0] is not H:
        if len(_ARRAYS) > 64:
            _ARRAYS.clear()
        hit = (H, np.array(H.facets, dtype=np.int64))
        _ARRAYS[id(H)] = hit
    return hit[1]


def iteration_bound(beta: float, t: float, n: float, step_cap: int = 10 ** 8) -> tuple[float, float]:
    """Iterate ``h(x) = max(x - beta x^t, 0)`` from ``n`` until below 1.

    Returns ``(s_h, g)`` with ``g = n^(1-t) / (beta (1-t)) + 1``; ``s_h`` is
    ``math.inf`` if ``step_cap`` steps do not suffice.  Raises if
    ``s_h > g``, which would contradict the iteration lemma.
    """
    for x in (beta, t, n):
        if not math.isfinite(x):
            raise ValueError("inputs must be finite")
    if not (0 < t < 1 and beta > 0 and n >= 0):
        raise ValueError("need 0 < t < 1, beta > 0, n >= 0")
    g = n ** (1 - t) / (beta * (1 - t)) + 1
    x = float(n)
    steps = 0
    while x >= 1:
        if steps >= step_cap:
            return math.inf, g
        x = x - beta * x ** t
        if x < 0:
            x = 0.0
        steps += 1
    if steps > g:
        raise AssertionError(f"s_h = {steps} exceeds g = {g}")
    return steps, g


def chromatic_upper_bound(n: int, d: int) -> float:
    """``n^(1-t) / (beta (1-t)) + 1`` with ``t = (d+1-ceil(d/2))/d`` and
    ``beta = beta_{d,d+1}``; meaningful for ``d >= 3``."""
    t = (d + 1 - math.ceil(d / 2)) / d
    if t >= 1:
        raise ValueError("bound needs t < 1, i.e. d >= 3")
    beta = alteration_constant(d, d + 1)
    return n ** (1 - t) / (beta * (1 - t)) + 1


def dey_pach_holds(H: FacetHypergraph) -> bool:
    d = H.dim
    return len(H) < (d + 1) * H.n ** math.ceil(d / 2)


# -- isomorphism -------------------------------------------------------------

def _pair_degrees(H: FacetHypergraph) -> list[list[int]]:
    deg = [[0] * H.n for _ in range(H.n)]
    for f in H.facets:
        for i, a in enumerate(f):
            for b in f[i + 1:]:
                deg[a][b] += 1
                deg[b][a] += 1
    return deg


def isomorphic(H1: FacetHypergraph, H2: FacetHypergraph) -> dict[int, int] | None:
    """A vertex bijection carrying the facets of ``H1`` onto those of ``H2``."""
    if H1.n != H2.n or len(H1) != len(H2):
        return None
    if sorted(map(len, H1.facets)) != sorted(map(len, H2.facets)):
        return None
    p1, p2 = _pair_degrees(H1), _pair_degrees(H2)
    c1, c2 = _joint_refine(H1, H2, p1, p2)
    if sorted(c1) != sorted(c2):
        return None
    n = H1.n
    target = H2.facet_set
    by_vertex = [[] for _ in range(n)]
    for f in H1.facets:
        by_vertex[f[-1]].append(f)
    # map vertices in ascending label order; facets are checked once their
    # largest vertex has been assigned
    order = list(range(n))
    phi: dict[int, int] = {}
    used = set()

    def extend(i):
        if i == n:
            return True
        v = order[i]
        for w in range(n):
            if w in used or c2[w] != c1[v]:
                continue
            if any(p1[v][u] != p2[w][phi[u]] for u in phi):
                continue
            phi[v] = w
            if all(tuple(sorted(phi[x] for x in f)) in target for f in by_vertex[v]):
                used.add(w)
                if extend(i + 1):
                    return True
                used.discard(w)
            del phi[v]
        return False

    return dict(phi) if extend(0) else None


def _joint_refine(H1, H2, p1, p2):
    """Color refinement run on both hypergraphs with a shared palette."""
    n = H1.n
    c1 = [(H1.vertex_degrees[v], tuple(sorted(x for x in p1[v] if x))) for v in range(n)]
    c2 = [(H2.vertex_degrees[v], tuple(sorted(x for x in p2[v] if x))) for v in range(n)]
    for _ in range(n):
        palette = {c: i for i, c in enumerate(sorted(set(c1) | set(c2)))}
        c1 = [palette[c] for c in c1]
        c2 = [palette[c] for c in c2]
        n1 = [(c1[v], tuple(sorted((p1[v][u], c1[u]) for u in range(n) if p1[v][u]))) for v in range(n)]
        n2 = [(c2[v], tuple(sorted((p2[v][u], c2[u]) for u in range(n) if p2[v][u]))) for v in range(n)]
        if len(set(n1) | set(n2)) == len(palette):
            break
        c1, c2 = n1, n2
    return c1, c2
