"""Randomised search for neighborly 3-spheres by single element extensions.

Each stage grows every beam member by one vertex: sample spanning stacked
balls, extend, score the results by epsilon and keep the best few.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .complex_core import FacetHypergraph, epsilon, neighborly_facet_count
from .constructions import OrderedStackedBall, single_element_extension, validate_stacked_ball
from . import solvers, topology


@lru_cache(maxsize=64)
def _triangle_index(K: FacetHypergraph) -> dict[tuple, tuple]:
    index: dict[tuple, list] = {}
    for f in K.facets:
        for k in range(4):
            index.setdefault(f[:k] + f[k + 1:], []).append(f)
    return {t: tuple(fs) for t, fs in index.items()}


def _triangles(f):
    return [f[:k] + f[k + 1:] for k in range(len(f))]


def sample_spanning_stacked_ball(K: FacetHypergraph, seed: int = 0,
                                 rng: np.random.Generator | None = None,
                                 max_nodes: int = 20_000) -> OrderedStackedBall | None:
    """A stacked 3-ball of ``n - 3`` facets of ``K`` that uses every vertex.

    The ball grows one facet at a time: the next facet lies across a current
    boundary triangle and brings exactly one unused vertex.  Dead ends are
    undone by backtracking; ``None`` once ``max_nodes`` expansions are spent.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    index = _triangle_index(K)
    n = K.n
    target = n - 3
    nodes = 0
    chosen: list[tuple] = []

    def grow(boundary: set, used: int) -> bool:
        nonlocal nodes
        if len(chosen) == target:
            return True
        nodes += 1
        if nodes > max_nodes:
            return False
        moves = []
        for t in sorted(boundary):
            for f in index[t]:
                if f in chosen:
                    continue
                (v,) = set(f) - set(t)
                if not used >> v & 1:
                    moves.append((t, f, v))
        for i in rng.permutation(len(moves)):
            t, f, v = moves[i]
            chosen.append(f)
            nb = (boundary - {t}) | {r for r in _triangles(f) if r != t}
            if grow(nb, used | 1 << v):
                return True
            chosen.pop()
            if nodes > max_nodes:
                return False
        return False

    for i in rng.permutation(len(K.facets)):
        first = K.facets[i]
        chosen[:] = [first]
        used = 0
        for v in first:
            used |= 1 << v
        if grow(set(_triangles(first)), used):
            ball = OrderedStackedBall(tuple(chosen))
            assert validate_stacked_ball(ball) and len(ball.vertices) == n
            return ball
        if nodes > max_nodes:
            return None
    return None


@dataclass(frozen=True)
class SearchConfig:
    start: FacetHypergraph
    target_n: int
    samples_per_step: int = 100
    beam_width: int = 1
    objective: str = "epsilon_min"
    seed: int = 0
    budget_ms: float | None = None
    workers: int = 1
    screen_stages: tuple[int, ...] = ()
    screen_budget_ms: float | None = 10_000

    def __post_init__(self):
        if self.target_n <= self.start.n:
            raise ValueError("target_n must exceed the start vertex count")
        if self.samples_per_step < 1 or self.beam_width < 1:
            raise ValueError("samples_per_step and beam_width must be at least 1")
        if self.objective != "epsilon_min":
            raise ValueError(f"unknown objective {self.objective!r}")


@dataclass
class StageLog:
    n: int
    scores: list[int]
    kept: list[int]
    failed_samples: int
    cyclic_epsilon: int
    below_cyclic: bool
    screens: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SearchResult:
    winners: list[FacetHypergraph]
    stages: list[StageLog]
    truncated: bool
    beam: list[FacetHypergraph]

    def to_dict(self) -> dict:
        return {"truncated": self.truncated, "stages": [s.to_dict() for s in self.stages],
                "winner_sizes": [w.n for w in self.winners]}


def _candidate_rng(seed: int, stage: int, member: int, sample: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stage, member, sample)))


def _generate(args):
    K, seed, stage, member, sample = args
    ball = sample_spanning_stacked_ball(K, rng=_candidate_rng(seed, stage, member, sample))
    if ball is None:
        return None
    L = single_element_extension(K, ball, w=K.n)
    return L.facets, epsilon(L)


def _emit_check(K: FacetHypergraph) -> bool:
    return (len(K) == neighborly_facet_count(K.n) and topology.is_k_neighborly(K, 2)
            and topology.manifold_check_3d(K) and topology.homology(K).is_sphere(3))


def extension_search(cfg: SearchConfig) -> SearchResult:
    """Beam search over single element extensions minimising epsilon.

    Candidate ``(member m, sample i)`` at stage ``n`` draws from a stream
    seeded by ``(seed, n, m, i)``, so the outcome does not depend on
    ``workers``.  Ties go to the lexicographically smaller facet list, then
    the lower candidate index.
    """
    start_time = time.perf_counter()
    deadline = None if cfg.budget_ms is None else start_time + cfg.budget_ms / 1000
    beam = [cfg.start]
    winners, logs = [], []
    truncated = False
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for n in range(cfg.start.n, cfg.target_n):
            if deadline is not None and time.perf_counter() > deadline:
                truncated = True
                break
            tasks = [(K, cfg.seed, n, m, i) for m, K in enumerate(beam)
                     for i in range(cfg.samples_per_step)]
            if pool is None:
                results = list(map(_generate, tasks))
            else:
                results = list(pool.map(_generate, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
            seen = {}
            failed = 0
            for idx, res in enumerate(results):
                if res is None:
                    failed += 1
                    continue
                facets, eps = res
                if facets not in seen:
                    seen[facets] = (eps, facets, idx)
            if not seen:
                truncated = True
                break
            ranked = sorted(seen.values())
            kept = ranked[:cfg.beam_width]
            beam = [FacetHypergraph(n + 1, facets) for _, facets, _ in kept]
            for K in beam:
                if not _emit_check(K):
                    raise AssertionError(f"stage {n + 1}: emitted complex fails the sphere checks")
            cyc = (n + 1) * (n - 1)
            log = StageLog(n + 1, [e for e, _, _ in ranked], [e for e, _, _ in kept], failed, cyc,
                           kept[0][0] <= cyc)
            if n + 1 in cfg.screen_stages:
                log.screens = [screen(K, solvers.Budget(ms=cfg.screen_budget_ms)) for K in beam]
            logs.append(log)
            winners.append(beam[0])
    finally:
        if pool is not None:
            pool.shutdown()
    return SearchResult(winners, logs, truncated, beam)


def bichromatic_cover(K: FacetHypergraph, coloring) -> list[tuple[int, int]]:
    """For each facet, its lexicographically first pair of differently
    colored vertices; together these edges cover every facet."""
    pairs = set()
    for f in K.facets:
        pair = next((a, b) for i, a in enumerate(f) for b in f[i + 1:] if coloring[a] != coloring[b])
        pairs.add(pair)
    return sorted(pairs)


def screen(K: FacetHypergraph, budget: solvers.Budget | None = None) -> dict:
    """2-colorability, transversal ratio and epsilon of a candidate."""
    coloring = solvers.two_colorable(K)
    cert = solvers.transversal_number(K, budget)
    ratio = Fraction(cert.value, K.n)
    out = {
        "n": K.n,
        "two_colorable": coloring is not None,
        "tau": cert.value,
        "tau_status": cert.status,
        "tau_lower_bound": cert.lower_bound,
        "ratio": f"{ratio.numerator}/{ratio.denominator}",
        "epsilon": epsilon(K),
        "coloring": None,
        "bichromatic_edges": None,
    }
    if coloring is not None:
        out["coloring"] = [coloring[v] for v in range(K.n)]
        out["bichromatic_edges"] = [list(e) for e in bichromatic_cover(K, coloring)]
    return out
