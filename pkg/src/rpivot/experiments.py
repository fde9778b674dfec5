"""Experiment drivers behind the CLI: adversarial reproductions and ratios.

The layered adversarial family is too large to materialize as a line graph,
so its pivot process is simulated directly on the host graph: pivots of the
truncated run on the line graph are exactly the edges matched during r
rounds of simultaneous local-minimum matching on the host, and the full run
corresponds to running those rounds until no edge survives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ClaimViolation
from .exact import (
    BRUTE_FORCE_MAX_N,
    EXHAUSTIVE_MAX_N,
    brute_force_opt,
    exhaustive_permutation_stats,
    expected_cost_mc,
)
from .graph import Clustering, Graph, clustering_cost, substream
from .generators import (
    AdversarialInstance,
    clique_plus_path,
    layered_dimensions,
    layered_host,
)
from .pivot import r_pivot

__all__ = [
    "DEFAULT_HOST_EDGE_BUDGET",
    "HostMatchingResult",
    "SweepPoint",
    "LayeredSweepResult",
    "CliquePathReport",
    "RatioReport",
    "host_matching_counts",
    "host_matching_study",
    "sweep_sizes",
    "layered_sweep",
    "clique_path_report",
    "ratio_study",
]

DEFAULT_HOST_EDGE_BUDGET = 500_000


# ---------------------------------------------------------------------------
# matching rounds on a host graph = pivot rounds on its line graph


def _edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint columns of g's edges in the line graph's vertex order."""
    if g.m == 0:
        empty = np.empty(0, dtype=np.int32)
        return empty, empty
    pairs = np.fromiter(
        (x for e in g.edges() for x in e), dtype=np.int32, count=2 * g.m
    )
    return pairs[0::2].copy(), pairs[1::2].copy()


def _matching_kernel(
    hu: np.ndarray, hv: np.ndarray, n_host: int, order: np.ndarray, r: int
) -> tuple[int, int, int]:
    """(pivots after r rounds, pivots at completion, rounds to empty).

    ``order`` lists edge indices in ascending rank order.  Each round matches
    the surviving edges that precede every surviving edge sharing one of
    their endpoints, then drops every edge with a matched endpoint; the
    matched edges are exactly the pivots the line-graph rounds produce.
    """
    us, vs = hu[order], hv[order]
    total = 0
    at_r = 0
    rounds = 0
    fp = np.empty(n_host, dtype=np.int32)
    while us.size:
        rounds += 1
        ma = us.size
        pos = np.arange(ma, dtype=np.int32)
        # First surviving position of every vertex over both endpoint
        # columns: one reversed scatter over the interleaved columns leaves
        # the smallest position as the last write.
        fp[:] = ma
        w = np.empty(2 * ma, dtype=np.int32)
        w[0::2] = us
        w[1::2] = vs
        p2 = np.repeat(pos, 2)
        fp[w[::-1]] = p2[::-1]
        piv = (fp[us] == pos) & (fp[vs] == pos)
        total += int(np.count_nonzero(piv))
        if rounds == r:
            at_r = total
        matched = np.zeros(n_host, dtype=bool)
        matched[us[piv]] = True
        matched[vs[piv]] = True
        keep = ~(matched[us] | matched[vs])
        us, vs = us[keep], vs[keep]
    if rounds < r:
        at_r = total
    return at_r, total, rounds


def host_matching_counts(
    host: Graph, order: np.ndarray, r: int
) -> tuple[int, int, int]:
    """Single-trial pivot counts of the line-graph process, run on the host.

    ``order`` is a permutation of range(host.m) listing host edges (in the
    order ``host.edges()`` yields them) by ascending rank.  Returns (pivots
    after r truncated rounds, pivots of the run to completion, rounds the
    full run took).
    """
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    order = np.asarray(order)
    if sorted(order.tolist()) != list(range(host.m)):
        raise ValueError("order must be a permutation of the edge indices")
    hu, hv = _edge_arrays(host)
    return _matching_kernel(hu, hv, host.n, order, r)


def _host_matching_chunk(
    hu: np.ndarray,
    hv: np.ndarray,
    n_host: int,
    r: int,
    seed: int,
    lo: int,
    hi: int,
) -> tuple[int, int, np.ndarray]:
    s_at = s_tot = 0
    ratios = np.empty(hi - lo, dtype=np.float64)
    m = hu.size
    for t in range(lo, hi):
        order = substream(seed, t).permutation(m)
        at_r, total, _ = _matching_kernel(hu, hv, n_host, order, r)
        s_at += at_r
        s_tot += total
        ratios[t - lo] = at_r / total
    return s_at, s_tot, ratios


@dataclass(frozen=True)
class HostMatchingResult:
    """Monte-Carlo pivot-count statistics for one host graph.

    ``mean_ratio`` averages the per-trial truncated/full pivot-count ratio;
    ``ratio_of_means`` divides the two means instead and is reported for
    context only.
    """

    host_vertices: int
    host_edges: int
    r: int
    trials: int
    seed: int
    mean_pivots_truncated: float
    mean_pivots_full: float
    mean_ratio: float
    se_ratio: float
    ratio_of_means: float


def host_matching_study(
    host: Graph, r: int, trials: int, seed: int, threads: int = 1
) -> HostMatchingResult:
    """Estimate truncated and full pivot counts of the line-graph process.

    Trial t draws its edge order from substream(seed, t), so results do not
    depend on ``threads``.  The full count is at least 1 whenever the host
    has an edge, which keeps every per-trial ratio defined.
    """
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    if host.m == 0:
        raise ValueError("host graph has no edges to match")
    hu, hv = _edge_arrays(host)
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        bounds = np.linspace(0, trials, threads + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(
                    _host_matching_chunk, hu, hv, host.n, r, seed, int(lo), int(hi)
                )
                for lo, hi in zip(bounds, bounds[1:])
                if hi > lo
            ]
            parts = [f.result() for f in futs]
        s_at = sum(p[0] for p in parts)
        s_tot = sum(p[1] for p in parts)
        ratios = np.concatenate([p[2] for p in parts])
    else:
        s_at, s_tot, ratios = _host_matching_chunk(
            hu, hv, host.n, r, seed, 0, trials
        )
    # Reduce the full trial-ordered array in one place so the result cannot
    # depend on how trials were split across workers.
    s_ratio = float(ratios.sum())
    q_ratio = float((ratios * ratios).sum())
    T = trials
    mean_ratio = s_ratio / T
    var = max(q_ratio - s_ratio * s_ratio / T, 0.0) / (T - 1)
    return HostMatchingResult(
        host_vertices=host.n,
        host_edges=host.m,
        r=r,
        trials=T,
        seed=seed,
        mean_pivots_truncated=s_at / T,
        mean_pivots_full=s_tot / T,
        mean_ratio=mean_ratio,
        se_ratio=(var / T) ** 0.5,
        ratio_of_means=(s_at / T) / (s_tot / T),
    )


# ---------------------------------------------------------------------------
# layered-family sweep


def sweep_sizes(
    r: int, host_edge_budget: int = DEFAULT_HOST_EDGE_BUDGET
) -> tuple[int, ...]:
    """Last-layer size requests for a sweep of growing scale factors.

    Valid sizes sharing a scale factor give near-identical pivot ratios, so
    the sweep takes the smallest size at each integer factor whose host fits
    the edge budget.
    """
    sizes: list[int] = []
    alpha = 2
    while True:
        request = alpha ** (3 * (2 * r + 2) - 4)
        dims = layered_dimensions(r, request)
        if dims.host_edges > host_edge_budget:
            break
        sizes.append(request)
        alpha += 1
    if len(sizes) < 2:
        raise ValueError(
            f"host edge budget {host_edge_budget} admits only {len(sizes)} "
            f"sweep point(s) at r={r}; raise the budget"
        )
    return tuple(sizes)


@dataclass(frozen=True)
class SweepPoint:
    """One layered instance of the sweep with its pivot-count statistics."""

    n_requested: int
    n_used: int
    alpha: int
    seed: int
    stats: HostMatchingResult


@dataclass(frozen=True)
class LayeredSweepResult:
    """Truncated/full pivot-count ratio across growing layered instances."""

    r: int
    trials: int
    seed: int
    points: tuple[SweepPoint, ...]

    def ratios(self) -> list[float]:
        return [p.stats.mean_ratio for p in self.points]

    def is_decreasing(self) -> bool:
        rs = self.ratios()
        return all(a > b for a, b in zip(rs, rs[1:]))

    def endpoint_separation_sigmas(self) -> float:
        """(first - last) mean ratio over the combined standard error."""
        first, last = self.points[0].stats, self.points[-1].stats
        gap = first.mean_ratio - last.mean_ratio
        se = math.hypot(first.se_ratio, last.se_ratio)
        return gap / se if se > 0 else math.inf


def _derive_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence((seed, index)).generate_state(1)[0])


def layered_sweep(
    r: int,
    trials: int,
    seed: int,
    sizes: tuple[int, ...] | None = None,
    host_edge_budget: int = DEFAULT_HOST_EDGE_BUDGET,
    threads: int = 1,
) -> LayeredSweepResult:
    """Pivot-count ratio of the layered family across a size sweep.

    Each point runs :func:`host_matching_study` on its own derived seed
    (recorded per point, so any point can be replayed alone).
    """
    if sizes is None:
        sizes = sweep_sizes(r, host_edge_budget)
    if not sizes:
        raise ValueError("need at least one sweep size")
    points = []
    for idx, request in enumerate(sizes):
        host = layered_host(r, request)
        point_seed = _derive_seed(seed, idx)
        stats = host_matching_study(host.graph, r, trials, point_seed, threads)
        points.append(
            SweepPoint(
                n_requested=request,
                n_used=host.n_used,
                alpha=host.alpha,
                seed=point_seed,
                stats=stats,
            )
        )
    return LayeredSweepResult(r=r, trials=trials, seed=seed, points=tuple(points))


# ---------------------------------------------------------------------------
# clique-plus-path reproduction


@dataclass(frozen=True)
class CliquePathReport:
    """Deterministic truncated run on the clique-plus-path instance.

    ``witness_cost`` is the cost of pairing consecutive path vertices and
    keeping the clique whole, an upper bound on the optimum; ``ratio`` is
    the truncated cost over that witness.  ``reference_ratio`` is the
    N(N-1)/(2(2r+1)) curve the family is built to exceed up to constants.
    """

    clique_n: int
    r: int
    n: int
    m: int
    cost: int
    witness_cost: int
    ratio: float
    reference_ratio: float
    pivots: tuple[int, ...]
    clique_all_singletons: bool


def clique_path_report(clique_n: int, r: int) -> CliquePathReport:
    """Run the truncated rounds on the adversarial instance and certify it.

    The fixed ranks force one pivot per round to march down the path, so
    after r rounds the clique is untouched and every clique vertex pays
    its full degree; violations of that shape raise :class:`ClaimViolation`.
    """
    inst: AdversarialInstance = clique_plus_path(clique_n, r)
    g = inst.graph
    assert inst.ranks is not None
    state = r_pivot(g, inst.ranks, r)
    tail = 2 * r
    expected_pivots = tuple(range(0, tail, 2))
    if state.pivots != expected_pivots:
        raise ClaimViolation(
            f"expected path pivots {expected_pivots}, got {state.pivots}"
        )
    clique_ids = range(tail, g.n)
    if any(state.settle_round[v] != 0 for v in clique_ids):
        raise ClaimViolation("a clique vertex settled within r rounds")
    blocks = state.clustering.blocks()
    singleton = all(
        len(blocks[state.clustering.ids[v]]) == 1 for v in clique_ids
    )
    if not singleton:
        raise ClaimViolation("a clique vertex escaped its singleton cluster")
    cost = clustering_cost(g, state.clustering)
    witness = _clique_path_witness(clique_n, r, g.n)
    witness_cost = clustering_cost(g, witness)
    return CliquePathReport(
        clique_n=clique_n,
        r=r,
        n=g.n,
        m=g.m,
        cost=cost,
        witness_cost=witness_cost,
        ratio=cost / witness_cost,
        reference_ratio=clique_n * (clique_n - 1) / (2 * (2 * r + 1)),
        pivots=state.pivots,
        clique_all_singletons=singleton,
    )


def _clique_path_witness(clique_n: int, r: int, n: int) -> Clustering:
    """Clique as one cluster, path vertices paired consecutively."""
    tail = 2 * r
    ids = [0] * n
    for i in range(0, tail, 2):
        ids[i] = ids[i + 1] = 1 + i // 2
    return Clustering(ids=tuple(ids), num_clusters=1 + r)


# ---------------------------------------------------------------------------
# approximation-ratio study


@dataclass(frozen=True)
class RatioReport:
    """Expected cost and mistake count against the optimum and its bounds.

    ``ratio_cost`` and ``ratio_x`` are None when opt is 0 (all-cliques
    inputs); the raw means still say whether the algorithm matched the
    zero-cost optimum.
    """

    n: int
    m: int
    r: int
    opt: int
    opt_source: str
    exhaustive: bool
    trials: int
    seed: int | None
    mean_cost_rpivot: float
    se_cost_rpivot: float
    mean_cost_pivot: float
    se_cost_pivot: float
    mean_x: float
    se_x: float
    cost_bound_factor: float
    x_bound_factor: float
    ratio_cost: float | None
    ratio_x: float | None


def ratio_study(
    g: Graph,
    r: int,
    trials: int | str = 10_000,
    seed: int = 0,
    opt: int | None = None,
    threads: int = 1,
) -> RatioReport:
    """Measure E[cost] and E|X| against opt and the 3+8/(2r-1) curve.

    ``trials="exhaustive"`` averages over every permutation (small n only);
    otherwise Monte-Carlo with per-trial substreams.  ``opt`` may be given
    for graphs too large to solve exactly.
    """
    if opt is None:
        if g.n > BRUTE_FORCE_MAX_N:
            raise ValueError(
                f"n={g.n} exceeds the exact-opt cap {BRUTE_FORCE_MAX_N}; "
                f"pass opt explicitly"
            )
        opt_val = brute_force_opt(g).cost
        opt_source = "brute-force"
    else:
        if opt < 0:
            raise ValueError(f"opt must be nonnegative, got {opt}")
        opt_val = opt
        opt_source = "given"
    exhaustive = trials == "exhaustive"
    if exhaustive:
        if g.n > EXHAUSTIVE_MAX_N:
            raise ValueError(
                f"exhaustive averaging capped at n={EXHAUSTIVE_MAX_N}, got {g.n}"
            )
        ex = exhaustive_permutation_stats(g, r)
        T = ex.permutations
        mean_rp, se_rp = ex.sum_cost_rpivot / T, 0.0
        mean_p, se_p = ex.sum_cost_pivot / T, 0.0
        mean_x, se_x = ex.sum_x / T, 0.0
        used_seed: int | None = None
    else:
        if not isinstance(trials, int):
            raise ValueError(f"trials must be an int or 'exhaustive', got {trials!r}")
        mc = expected_cost_mc(g, r, trials, seed, threads)
        T = mc.trials
        mean_rp, se_rp = mc.mean_cost_rpivot, mc.se_cost_rpivot
        mean_p, se_p = mc.mean_cost_pivot, mc.se_cost_pivot
        mean_x, se_x = mc.mean_x, mc.se_x
        used_seed = seed
    return RatioReport(
        n=g.n,
        m=g.m,
        r=r,
        opt=opt_val,
        opt_source=opt_source,
        exhaustive=exhaustive,
        trials=T,
        seed=used_seed,
        mean_cost_rpivot=mean_rp,
        se_cost_rpivot=se_rp,
        mean_cost_pivot=mean_p,
        se_cost_pivot=se_p,
        mean_x=mean_x,
        se_x=se_x,
        cost_bound_factor=3 + 8 / (2 * r - 1),
        x_bound_factor=8 / (2 * r - 1),
        ratio_cost=mean_rp / opt_val if opt_val > 0 else None,
        ratio_x=mean_x / opt_val if opt_val > 0 else None,
    )
