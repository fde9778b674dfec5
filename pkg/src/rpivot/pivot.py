"""Pivot clustering: sequential, parallel, and truncated-round variants.

All variants share one total order on vertices, the (rank, id) key from a
``RankAssignment``.  The sequential algorithm repeatedly takes the lowest
remaining vertex as a pivot and clusters it with its remaining neighbors.
The parallel formulation marks every vertex that is a local minimum among
remaining neighbors as a pivot in each round; run to completion it selects
exactly the sequential pivot set.  The truncated variant stops after r
rounds and settles pivots and their neighbors; cluster formation then lets
each non-pivot join its minimum-rank pivot neighbor unless a still-unsettled
neighbor outranks every pivot neighbor, in which case it stays a singleton.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import ClaimViolation
from .graph import Clustering, Graph, RankAssignment, RankKind

__all__ = [
    "PivotRun",
    "RPivotState",
    "ExtraMistakes",
    "MistakeCase",
    "sequential_pivot",
    "parallel_pivot_full",
    "r_pivot",
    "r_pivot_variant",
    "extra_mistakes",
    "assemble_clustering",
    "run_report",
]


@dataclass(frozen=True)
class PivotRun:
    """Result of a full pivot run (sequential or parallel).

    ``pivots`` is in ascending key order, which is also the cluster
    numbering.  ``pivot_of[v]`` is the minimum-key pivot in the closed
    neighborhood of v; for pivots it is v itself.  ``rounds_used`` and
    ``round_of_pivot`` are populated by the parallel formulation only.
    """

    clustering: Clustering
    pivots: tuple[int, ...]
    pivot_of: tuple[int, ...]
    rounds_used: int | None = None
    round_of_pivot: dict[int, int] | None = None

    @property
    def pivot_set(self) -> frozenset[int]:
        return frozenset(self.pivots)


@dataclass(frozen=True)
class RPivotState:
    """State after r truncated rounds plus the final cluster formation.

    ``settle_round[v]`` is the round that settled v, or 0 if v is still
    unsettled; ``pivot_round[v]`` likewise for becoming a pivot.  A vertex is
    settled iff it is a pivot or adjacent to one.  ``cluster_pivot[v]`` is
    the pivot whose cluster v belongs to, or -1 for a non-pivot singleton.
    """

    r: int
    clustering: Clustering
    pivots: tuple[int, ...]
    settle_round: tuple[int, ...]
    pivot_round: tuple[int, ...]
    cluster_pivot: tuple[int, ...]
    round_minima: tuple[dict[int, int], ...] | None = field(
        default=None, repr=False, compare=False
    )

    @property
    def pivot_set(self) -> frozenset[int]:
        return frozenset(self.pivots)

    def settled(self, v: int) -> bool:
        return self.settle_round[v] > 0

    def unsettled_after(self, t: int | None = None) -> list[int]:
        """Vertices not yet settled after round t (default: after all r)."""
        if t is None:
            t = self.r
        sr = self.settle_round
        return [v for v in range(len(sr)) if sr[v] == 0 or sr[v] > t]


class MistakeCase(Enum):
    """Why a truncated run pays for a pair the full run got right."""

    PIVOT_UNSETTLED = "pivot-unsettled"
    PIVOT_SETTLED_BLOCKER = "pivot-settled-blocker"


@dataclass(frozen=True)
class ExtraMistakes:
    """Edge pairs the truncated run separates although the full run kept them.

    Every pair carries the shared full-run pivot of its endpoints, a case tag,
    and for the settled case a minimum-rank blocking witness: an unsettled
    non-pivot neighbor of a singleton endpoint that outranks the shared pivot.
    """

    pairs: tuple[tuple[int, int], ...]
    common_pivot: dict[tuple[int, int], int]
    case: dict[tuple[int, int], MistakeCase]
    witness: dict[tuple[int, int], int | None]
    pivot_run: PivotRun = field(repr=False, compare=False)
    rpivot_state: RPivotState = field(repr=False, compare=False)


def _key_list(ranks: RankAssignment) -> list[tuple[int, int]]:
    rs = ranks.ranks
    return [(rs[v], v) for v in range(len(rs))]


def sequential_pivot(g: Graph, ranks: RankAssignment) -> PivotRun:
    """Classical pivot clustering under the given ranks."""
    if ranks.n != g.n:
        raise ValueError("ranks and graph disagree on n")
    adj = g.adj
    pivot_of = [-1] * g.n
    pivots: list[int] = []
    for v in ranks.order():
        if pivot_of[v] >= 0:
            continue
        pivots.append(v)
        pivot_of[v] = v
        for u in adj[v]:
            if pivot_of[u] < 0:
                pivot_of[u] = v
    index = {p: i for i, p in enumerate(pivots)}
    ids = tuple(index[p] for p in pivot_of)
    return PivotRun(
        clustering=Clustering(ids, len(pivots)),
        pivots=tuple(pivots),
        pivot_of=tuple(pivot_of),
    )


def parallel_pivot_full(g: Graph, ranks: RankAssignment) -> PivotRun:
    """Round-parallel pivot selection run until the graph is exhausted.

    Each round marks every remaining vertex that precedes all its remaining
    neighbors, then removes the marked vertices together with their
    neighbors.  Clusters are formed exactly as in the sequential algorithm:
    every vertex goes to the minimum-key pivot of its closed neighborhood.
    """
    if ranks.n != g.n:
        raise ValueError("ranks and graph disagree on n")
    key = _key_list(ranks)
    adj = g.adj
    alive = bytearray([1]) * g.n
    remaining = g.n
    rounds = 0
    round_of: dict[int, int] = {}
    while remaining > 0:
        rounds += 1
        new_pivots = []
        for v in range(g.n):
            if not alive[v]:
                continue
            kv = key[v]
            if all(not alive[u] or key[u] > kv for u in adj[v]):
                new_pivots.append(v)
        for p in new_pivots:
            round_of[p] = rounds
            if alive[p]:
                alive[p] = 0
                remaining -= 1
            for u in adj[p]:
                if alive[u]:
                    alive[u] = 0
                    remaining -= 1
    pivot_set = set(round_of)
    pivot_of = []
    for v in range(g.n):
        if v in pivot_set:
            pivot_of.append(v)
            continue
        best = min((u for u in adj[v] if u in pivot_set), key=lambda u: key[u])
        pivot_of.append(best)
    pivots = sorted(pivot_set, key=lambda p: key[p])
    index = {p: i for i, p in enumerate(pivots)}
    ids = tuple(index[p] for p in pivot_of)
    return PivotRun(
        clustering=Clustering(ids, len(pivots)),
        pivots=tuple(pivots),
        pivot_of=tuple(pivot_of),
        rounds_used=rounds,
        round_of_pivot=round_of,
    )


def _truncated_core(
    g: Graph,
    key: list[tuple[int, int]],
    r: int,
    record_minima: bool,
) -> tuple[list[int], list[int], tuple[dict[int, int], ...] | None]:
    adj = g.adj
    settle_round = [0] * g.n
    pivot_round = [0] * g.n
    unsettled = list(range(g.n))
    minima: list[dict[int, int]] = []
    for t in range(1, r + 1):
        if record_minima:
            eta: dict[int, int] = {}
            for v in unsettled:
                best = v
                kb = key[v]
                for u in adj[v]:
                    if settle_round[u] == 0 and key[u] < kb:
                        best = u
                        kb = key[u]
                eta[v] = best
            minima.append(eta)
            new_pivots = [v for v in unsettled if eta[v] == v]
        else:
            new_pivots = []
            for v in unsettled:
                kv = key[v]
                if all(settle_round[u] != 0 or key[u] > kv for u in adj[v]):
                    new_pivots.append(v)
        for p in new_pivots:
            pivot_round[p] = t
            settle_round[p] = t
            for u in adj[p]:
                if settle_round[u] == 0:
                    settle_round[u] = t
        unsettled = [v for v in unsettled if settle_round[v] == 0]
        if not unsettled and not record_minima:
            break
    return settle_round, pivot_round, tuple(minima) if record_minima else None


def assemble_clustering(
    n: int,
    key: list[tuple[int, int]],
    cluster_pivot: list[int] | tuple[int, ...],
) -> tuple[Clustering, tuple[int, ...]]:
    """Canonical cluster numbering shared by every algorithm and executor.

    ``cluster_pivot[v]`` names the pivot of v's cluster (v itself when v is a
    pivot) or -1 for a non-pivot singleton.  Pivot clusters are numbered in
    ascending key order, then singletons in ascending vertex order, so two
    runs that agree on cluster_pivot produce identical Clustering values.
    """
    pivots = sorted(
        (v for v in range(n) if cluster_pivot[v] == v), key=lambda p: key[p]
    )
    index = {p: i for i, p in enumerate(pivots)}
    next_id = len(pivots)
    ids = [0] * n
    for v in range(n):
        cp = cluster_pivot[v]
        if cp >= 0:
            ids[v] = index[cp]
        else:
            ids[v] = next_id
            next_id += 1
    return Clustering(tuple(ids), next_id), tuple(pivots)


def _truncated_clusters(
    g: Graph,
    key: list[tuple[int, int]],
    settle_round: list[int],
    pivot_round: list[int],
) -> tuple[Clustering, tuple[int, ...], tuple[int, ...]]:
    adj = g.adj
    cluster_pivot = [-1] * g.n
    for v in range(g.n):
        if pivot_round[v]:
            cluster_pivot[v] = v
            continue
        best_p = -1
        kp = None
        kw = None
        for z in adj[v]:
            kz = key[z]
            if pivot_round[z]:
                if kp is None or kz < kp:
                    best_p, kp = z, kz
            elif settle_round[z] == 0:
                if kw is None or kz < kw:
                    kw = kz
        if kp is not None and (kw is None or kw > kp):
            cluster_pivot[v] = best_p
    clustering, pivots = assemble_clustering(g.n, key, cluster_pivot)
    return clustering, pivots, tuple(cluster_pivot)


def _r_pivot_any(
    g: Graph, ranks: RankAssignment, r: int, record_minima: bool
) -> RPivotState:
    if ranks.n != g.n:
        raise ValueError("ranks and graph disagree on n")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    key = _key_list(ranks)
    settle_round, pivot_round, minima = _truncated_core(g, key, r, record_minima)
    clustering, pivots, cluster_pivot = _truncated_clusters(
        g, key, settle_round, pivot_round
    )
    return RPivotState(
        r=r,
        clustering=clustering,
        pivots=pivots,
        settle_round=tuple(settle_round),
        pivot_round=tuple(pivot_round),
        cluster_pivot=cluster_pivot,
        round_minima=minima,
    )


def r_pivot(
    g: Graph, ranks: RankAssignment, r: int, record_minima: bool = False
) -> RPivotState:
    """r truncated parallel rounds over a permutation rank assignment."""
    if ranks.kind is not RankKind.PERMUTATION:
        raise ValueError("r_pivot needs permutation ranks; use r_pivot_variant")
    return _r_pivot_any(g, ranks, r, record_minima)


def r_pivot_variant(
    g: Graph, ranks: RankAssignment, r: int, record_minima: bool = False
) -> RPivotState:
    """Truncated rounds over i.i.d. integer ranks with id tie-breaks."""
    if ranks.kind is not RankKind.INTEGER:
        raise ValueError("r_pivot_variant needs integer ranks; use r_pivot")
    return _r_pivot_any(g, ranks, r, record_minima)


def extra_mistakes(
    g: Graph,
    ranks: RankAssignment,
    r: int,
    pivot_run: PivotRun | None = None,
    rpivot_state: RPivotState | None = None,
) -> ExtraMistakes:
    """Pairs the truncated run pays for although the full run does not.

    Only edges qualify: a non-edge mistake would need the truncated run to
    merge a pair the full run separates, impossible because the truncated
    clustering refines the full one.  A violation raises
    :class:`ClaimViolation` rather than being silently dropped.
    """
    if ranks.kind is not RankKind.PERMUTATION:
        raise ValueError("extra mistakes are defined against permutation ranks")
    full = pivot_run if pivot_run is not None else sequential_pivot(g, ranks)
    trunc = (
        rpivot_state if rpivot_state is not None else r_pivot(g, ranks, r)
    )
    key = _key_list(ranks)
    full_of = full.pivot_of
    tids = trunc.clustering.ids
    pairs = [
        (u, v)
        for u, v in g.edges()
        if full_of[u] == full_of[v] and tids[u] != tids[v]
    ]
    # A merged pair the full run separates would be a non-edge mistake.
    for block in trunc.clustering.blocks():
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                a, b = block[i], block[j]
                if full_of[a] != full_of[b] and not g.has_edge(a, b):
                    raise ClaimViolation(
                        f"non-edge pair ({a}, {b}) merged by the truncated run "
                        f"but separated by the full run (n={g.n}, r={r})"
                    )
    full_pivots = full.pivot_set
    common: dict[tuple[int, int], int] = {}
    case: dict[tuple[int, int], MistakeCase] = {}
    witness: dict[tuple[int, int], int | None] = {}
    for u, v in pairs:
        p = full_of[u]
        common[(u, v)] = p
        if trunc.settle_round[p] == 0:
            case[(u, v)] = MistakeCase.PIVOT_UNSETTLED
            witness[(u, v)] = None
            continue
        case[(u, v)] = MistakeCase.PIVOT_SETTLED_BLOCKER
        kp = key[p]
        best = None
        kb = None
        for e in (u, v):
            if e == p or trunc.cluster_pivot[e] != -1:
                continue
            for z in g.adj[e]:
                if trunc.settle_round[z] == 0:
                    kz = key[z]
                    if kz < kp and (kb is None or kz < kb):
                        best, kb = z, kz
        if best is None:
            raise ClaimViolation(
                f"settled-pivot pair ({u}, {v}) lacks a blocking witness "
                f"(n={g.n}, r={r})"
            )
        if best in full_pivots:
            raise ClaimViolation(
                f"witness {best} for pair ({u}, {v}) is a full-run pivot"
            )
        witness[(u, v)] = best
    return ExtraMistakes(
        pairs=tuple(pairs),
        common_pivot=common,
        case=case,
        witness=witness,
        pivot_run=full,
        rpivot_state=trunc,
    )


def run_report(g: Graph, ranks: RankAssignment, r: int) -> dict:
    """JSON-ready summary of one truncated run against its full-run baseline."""
    from .graph import clustering_cost

    xm = extra_mistakes(g, ranks, r)
    state = xm.rpivot_state
    return {
        "schema": "rpivot/run-v1",
        "n": g.n,
        "m": g.m,
        "rounds": r,
        "pivots": list(state.pivots),
        "settled": [v for v in range(g.n) if state.settle_round[v] > 0],
        "clusters": state.clustering.blocks(),
        "cost": clustering_cost(g, state.clustering),
        "full_cost": clustering_cost(g, xm.pivot_run.clustering),
        "extra_mistakes": [
            {
                "pair": list(pair),
                "common_pivot": xm.common_pivot[pair],
                "case": xm.case[pair].value,
                "witness": xm.witness[pair],
            }
            for pair in xm.pairs
        ],
    }
