"""Exact and certified reference oracles for small instances.

Everything here is meant to be slow but beyond doubt: optimal clustering
cost by branch and bound over set partitions, bad-triangle enumeration, a
pair-disjoint triangle packing that certifies a lower bound, and exhaustive
or sampled cost statistics for the pivot algorithms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graph import (
    Clustering,
    Graph,
    RankAssignment,
    RankKind,
    clustering_cost,
    random_permutation,
    substream,
)
from .pivot import extra_mistakes, r_pivot, sequential_pivot

__all__ = [
    "OptResult",
    "MonteCarloStats",
    "ExhaustiveStats",
    "brute_force_opt",
    "bad_triangles",
    "greedy_triangle_packing",
    "expected_cost_mc",
    "exhaustive_permutation_stats",
]

BRUTE_FORCE_MAX_N = 13
EXHAUSTIVE_MAX_N = 8


@dataclass(frozen=True)
class OptResult:
    """Optimal disagreement cost with a witness partition."""

    cost: int
    witness: Clustering
    partitions_examined: int


def brute_force_opt(g: Graph) -> OptResult:
    """Exact minimum disagreement cost by branch and bound.

    Walks restricted-growth strings (vertex v joins an existing block or
    opens the next one), pruning branches whose partial cost already meets
    the best known.  Refuses n above BRUTE_FORCE_MAX_N.
    """
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force capped at n={BRUTE_FORCE_MAX_N}, got {n}")
    if n == 0:
        return OptResult(0, Clustering(ids=(), num_clusters=0), 1)
    total_pairs = n * (n - 1) // 2
    best_cost = min(g.m, total_pairs - g.m)
    best_ids: list[int] | None = None
    seq = sequential_pivot(g, RankAssignment(RankKind.PERMUTATION, tuple(range(n))))
    if seq.clustering.num_clusters == 1 or seq.clustering.num_clusters == n:
        pass  # already covered by the trivial bounds
    if clustering_cost(g, seq.clustering) < best_cost:
        best_cost = clustering_cost(g, seq.clustering)
        best_ids = list(seq.clustering.ids)
    earlier_nbrs = [sum(1 for u in g.adj[v] if u < v) for v in range(n)]
    assign = [0] * n
    block_sizes = [0] * (n + 1)
    nbrs_in_block = [[0] * (n + 1) for _ in range(n)]
    leaves = 0

    # Depth-first over (vertex, block choice) with incremental cost.
    # stack entries: (v, block, num_blocks_before, partial_cost_before)
    def place(v: int, b: int) -> int:
        delta = earlier_nbrs[v] - nbrs_in_block[v][b] + (
            block_sizes[b] - nbrs_in_block[v][b]
        )
        assign[v] = b
        block_sizes[b] += 1
        for u in g.adj[v]:
            if u > v:
                nbrs_in_block[u][b] += 1
        return delta

    def unplace(v: int, b: int) -> None:
        block_sizes[b] -= 1
        for u in g.adj[v]:
            if u > v:
                nbrs_in_block[u][b] -= 1

    def rec(v: int, num_blocks: int, cost: int) -> None:
        nonlocal best_cost, best_ids, leaves
        if v == n:
            leaves += 1
            if cost < best_cost:
                best_cost = cost
                best_ids = assign.copy()
            return
        for b in range(num_blocks + 1):
            delta = place(v, b)
            newc = cost + delta
            if newc < best_cost:
                rec(v + 1, max(num_blocks, b + 1), newc)
            unplace(v, b)

    rec(0, 0, 0)
    if best_ids is None:
        # One of the trivial bounds was already optimal.
        if best_cost == g.m:
            best_ids = list(range(n))
        else:
            best_ids = [0] * n
    witness = Clustering(ids=tuple(best_ids), num_clusters=max(best_ids) + 1)
    assert clustering_cost(g, witness) == best_cost
    return OptResult(best_cost, witness, leaves)


def bad_triangles(g: Graph) -> list[tuple[int, int, int]]:
    """All triples with exactly two edges, once each, center listed second."""
    out: list[tuple[int, int, int]] = []
    for b in range(g.n):
        nbrs = g.adj[b]
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                u, w = nbrs[i], nbrs[j]
                if not g.has_edge(u, w):
                    out.append((u, b, w))
    return out


def greedy_triangle_packing(
    g: Graph, seed: int | np.random.Generator = 0
) -> list[tuple[int, int, int]]:
    """Greedy pair-disjoint packing of bad triangles.

    No two kept triangles share any vertex pair, the missing edge included,
    so every clustering pays a distinct mistake per kept triangle: the count
    is a certified lower bound on the optimal cost.
    """
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    tris = bad_triangles(g)
    order = rng.permutation(len(tris))
    used: set[tuple[int, int]] = set()
    kept: list[tuple[int, int, int]] = []
    for idx in order:
        u, b, w = tris[idx]
        pairs = [tuple(sorted(p)) for p in ((u, b), (b, w), (u, w))]
        if any(p in used for p in pairs):
            continue
        used.update(pairs)
        kept.append((u, b, w))
    return kept


@dataclass(frozen=True)
class MonteCarloStats:
    """Sampled cost statistics for one (graph, r)."""

    trials: int
    seed: int
    r: int
    mean_cost_rpivot: float
    se_cost_rpivot: float
    mean_cost_pivot: float
    se_cost_pivot: float
    mean_x: float
    se_x: float


def _mc_accumulate(
    g: Graph, r: int, seed: int, lo: int, hi: int
) -> tuple[int, int, int, int, int, int]:
    s_rp = q_rp = s_p = q_p = s_x = q_x = 0
    for t in range(lo, hi):
        ranks = random_permutation(g.n, substream(seed, t))
        xm = extra_mistakes(g, ranks, r)
        c_p = clustering_cost(g, xm.pivot_run.clustering)
        c_rp = clustering_cost(g, xm.rpivot_state.clustering)
        x = len(xm.pairs)
        s_rp += c_rp
        q_rp += c_rp * c_rp
        s_p += c_p
        q_p += c_p * c_p
        s_x += x
        q_x += x * x
    return s_rp, q_rp, s_p, q_p, s_x, q_x


def expected_cost_mc(
    g: Graph, r: int, trials: int, seed: int, threads: int = 1
) -> MonteCarloStats:
    """Monte-Carlo estimates of truncated cost, full cost, and mistakes.

    Per-trial substreams make the result independent of ``threads``.
    """
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        bounds = np.linspace(0, trials, threads + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(_mc_accumulate, g, r, seed, int(lo), int(hi))
                for lo, hi in zip(bounds, bounds[1:])
                if hi > lo
            ]
            parts = [f.result() for f in futs]
        sums = [sum(p[i] for p in parts) for i in range(6)]
    else:
        sums = list(_mc_accumulate(g, r, seed, 0, trials))
    T = trials

    def stats(s: int, q: int) -> tuple[float, float]:
        mean = s / T
        var = max(q - s * s / T, 0.0) / (T - 1)
        return mean, (var / T) ** 0.5

    m_rp, se_rp = stats(sums[0], sums[1])
    m_p, se_p = stats(sums[2], sums[3])
    m_x, se_x = stats(sums[4], sums[5])
    return MonteCarloStats(
        trials=T,
        seed=seed,
        r=r,
        mean_cost_rpivot=m_rp,
        se_cost_rpivot=se_rp,
        mean_cost_pivot=m_p,
        se_cost_pivot=se_p,
        mean_x=m_x,
        se_x=se_x,
    )


@dataclass(frozen=True)
class ExhaustiveStats:
    """Exact integer sums over all n! rank permutations."""

    n: int
    r: int
    permutations: int
    sum_cost_pivot: int
    sum_cost_rpivot: int
    sum_x: int


def exhaustive_permutation_stats(g: Graph, r: int) -> ExhaustiveStats:
    """Integer cost sums over every permutation; exact, n capped at 8."""
    n = g.n
    if n > EXHAUSTIVE_MAX_N:
        raise ValueError(f"exhaustive sweep capped at n={EXHAUSTIVE_MAX_N}, got {n}")
    s_p = s_rp = s_x = 0
    count = 0
    for perm in itertools.permutations(range(n)):
        ranks = RankAssignment(RankKind.PERMUTATION, perm)
        xm = extra_mistakes(g, ranks, r)
        s_p += clustering_cost(g, xm.pivot_run.clustering)
        s_rp += clustering_cost(g, xm.rpivot_state.clustering)
        s_x += len(xm.pairs)
        count += 1
    return ExhaustiveStats(
        n=n,
        r=r,
        permutations=count,
        sum_cost_pivot=s_p,
        sum_cost_rpivot=s_rp,
        sum_x=s_x,
    )
