"""Simulated execution models with explicit resource accounting.

Four ways to run the truncated clustering, each producing the exact same
canonical clustering as the in-memory algorithm while charging the resources
its model cares about:

* streaming: 2r+1 restartable passes over an edge stream, O(n) words;
* message passing: 2r+1 synchronous rounds, short messages between neighbors;
* machine sharding: sublinear-capacity machines running join, aggregate, and
  reduce primitives, with round bookings per primitive;
* local probes: per-vertex answers from a bounded-radius ball of adjacency
  probes.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .graph import Graph, RankAssignment, RankKind
from .pivot import RPivotState, assemble_clustering

__all__ = [
    "StreamingReport",
    "LocalReport",
    "MpcReport",
    "LcaAnswer",
    "streaming_execute",
    "local_execute",
    "mpc_execute",
    "lca_query",
    "lca_cluster_all",
]

_INF_KEY = (float("inf"), float("inf"))


def _keys(ranks: RankAssignment) -> list[tuple[int, int]]:
    return [(r, v) for v, r in enumerate(ranks.ranks)]


# ---------------------------------------------------------------------------
# streaming


@dataclass(frozen=True)
class StreamingReport:
    """Accounting for one streaming run.

    ``peak_words`` counts per-vertex working storage only (the O(1) loop
    registers are not charged); the bound it is checked against is 6n.
    """

    n: int
    m: int
    r: int
    passes: int
    peak_words: int
    words_bound: int
    edge_checksum: int


def _stream_factory(
    source: Sequence[tuple[int, int]] | Callable[[], Iterable[tuple[int, int]]] | str | Path,
) -> Callable[[], Iterable[tuple[int, int]]]:
    if callable(source):
        return source
    if isinstance(source, (str, Path)):
        path = Path(source)

        def from_file() -> Iterable[tuple[int, int]]:
            # Same text format read_graph_text accepts, parsed lazily so the
            # graph never sits in memory whole.
            with open(path) as fh:
                header_seen = False
                for line in fh:
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    if not header_seen:
                        header_seen = True
                        continue
                    a, b = line.split()
                    yield int(a), int(b)

        return from_file
    edges = list(source)
    return lambda: iter(edges)


def streaming_execute(
    source: Sequence[tuple[int, int]] | Callable[[], Iterable[tuple[int, int]]] | str | Path,
    n: int,
    ranks: RankAssignment,
    r: int,
) -> tuple[RPivotState, StreamingReport]:
    """Truncated clustering from 2r+1 passes over a restartable edge stream.

    Two passes per round (a neighborhood-minimum pass, then a settling pass)
    and one final pass that fills a best-pivot and a best-unsettled register
    per vertex.  Every pass recomputes an order-insensitive checksum of the
    stream; a source that changes between passes is rejected.
    """
    if ranks.n != n:
        raise ValueError("ranks and n disagree")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    make_pass = _stream_factory(source)
    key = _keys(ranks)
    settle_round = [0] * n
    pivot_round = [0] * n
    ref_count: int | None = None
    ref_xor: int | None = None

    def edges_checked() -> Iterable[tuple[int, int]]:
        nonlocal ref_count, ref_xor
        count = 0
        acc = 0
        for u, v in make_pass():
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValueError(f"bad stream edge ({u}, {v}) for n={n}")
            a, b = (u, v) if u < v else (v, u)
            count += 1
            acc ^= hash((a, b))
            yield u, v
        if ref_count is None:
            ref_count, ref_xor = count, acc
        elif (count, acc) != (ref_count, ref_xor):
            raise ValueError(
                "stream changed between passes: "
                f"saw {count} edges, expected {ref_count}"
            )

    passes = 0
    peak_words = 0

    def charge(words: int) -> None:
        nonlocal peak_words
        peak_words = max(peak_words, words)

    for t in range(1, r + 1):
        # Pass 2t-1: eta[v] = min key among v's unsettled closed neighborhood.
        eta = [key[v] if settle_round[v] == 0 else _INF_KEY for v in range(n)]
        passes += 1
        charge(4 * n)  # ranks, settle rounds, pivot rounds, eta
        for u, v in edges_checked():
            if settle_round[u] == 0 and key[u] < eta[v]:
                eta[v] = key[u]
            if settle_round[v] == 0 and key[v] < eta[u]:
                eta[u] = key[v]
        for v in range(n):
            if settle_round[v] == 0 and eta[v] == key[v]:
                pivot_round[v] = t
                settle_round[v] = t
        # Pass 2t: neighbors of this round's pivots settle.
        passes += 1
        charge(4 * n)
        for u, v in edges_checked():
            if pivot_round[u] == t and settle_round[v] == 0:
                settle_round[v] = t
            if pivot_round[v] == t and settle_round[u] == 0:
                settle_round[u] = t
    # Final pass: two registers per vertex pick the cluster.
    best_pivot = [-1] * n
    best_unsettled_key: list[tuple] = [_INF_KEY] * n
    passes += 1
    charge(5 * n)
    for u, v in edges_checked():
        for a, b in ((u, v), (v, u)):
            if pivot_round[a] > 0:
                if best_pivot[b] < 0 or key[a] < key[best_pivot[b]]:
                    best_pivot[b] = a
            elif settle_round[a] == 0 and key[a] < best_unsettled_key[b]:
                best_unsettled_key[b] = key[a]
    cluster_pivot = [-1] * n
    for v in range(n):
        if pivot_round[v] > 0:
            cluster_pivot[v] = v
        elif best_pivot[v] >= 0 and key[best_pivot[v]] < best_unsettled_key[v]:
            cluster_pivot[v] = best_pivot[v]
    clustering, pivots = assemble_clustering(n, key, cluster_pivot)
    state = RPivotState(
        r=r,
        clustering=clustering,
        pivots=pivots,
        settle_round=tuple(settle_round),
        pivot_round=tuple(pivot_round),
        cluster_pivot=tuple(cluster_pivot),
    )
    assert ref_count is not None and ref_xor is not None
    report = StreamingReport(
        n=n,
        m=ref_count,
        r=r,
        passes=passes,
        peak_words=peak_words,
        words_bound=6 * n,
        edge_checksum=ref_xor,
    )
    if report.passes != 2 * r + 1:
        raise AssertionError(f"pass budget violated: {report.passes} != {2 * r + 1}")
    if report.peak_words > report.words_bound:
        raise AssertionError(
            f"memory budget violated: {report.peak_words} > {report.words_bound}"
        )
    return state, report


# ---------------------------------------------------------------------------
# synchronous message passing

TAG_UNSETTLED = 0
TAG_PIVOT = 1
TAG_SETTLED = 2


@dataclass(frozen=True)
class LocalReport:
    """Accounting for one synchronous message-passing run.

    ``state_history[t][v]`` is v's status tag after communication round t
    (round 0 is the initial state).  Messages carry a 2-bit tag and a rank;
    receivers know sender identities, so ties need no extra payload.
    """

    n: int
    r: int
    rounds: int
    messages_sent: int
    max_message_bits: int
    rank_bits: int
    state_history: tuple[tuple[int, ...], ...]


def local_execute(
    g: Graph, ranks: RankAssignment, r: int
) -> tuple[RPivotState, LocalReport]:
    """Truncated clustering in 2r+1 synchronous neighbor-message rounds.

    Odd rounds: unsettled vertices announce their rank; an unsettled vertex
    that precedes every announcing neighbor marks itself a pivot.  Even
    rounds: new pivots announce; unsettled receivers settle.  The final round
    has every vertex announce its status so non-pivots can pick between their
    best pivot neighbor and best unsettled neighbor.

    Vertices draw ranks independently, so only integer ranks make sense here;
    a shared permutation has no distributed analogue.
    """
    if ranks.kind is not RankKind.INTEGER:
        raise ValueError("local_execute needs integer ranks")
    if ranks.n != g.n:
        raise ValueError("ranks and graph disagree on n")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    n = g.n
    key = _keys(ranks)
    max_rank = max(ranks.ranks) if n else 0
    rank_bits = max(1, int(max_rank).bit_length())
    msg_bits = 2 + rank_bits
    settle_round = [0] * n
    pivot_round = [0] * n
    best_pivot = [-1] * n
    best_unsettled_key: list[tuple] = [_INF_KEY] * n
    messages = 0
    history: list[tuple[int, ...]] = []

    def status(v: int) -> int:
        if pivot_round[v] > 0:
            return TAG_PIVOT
        if settle_round[v] > 0:
            return TAG_SETTLED
        return TAG_UNSETTLED

    def snapshot() -> None:
        history.append(tuple(status(v) for v in range(n)))

    snapshot()
    rounds = 0
    for t in range(1, r + 1):
        # Announcement round: inbox[v] collects (key of sender) per edge.
        rounds += 1
        inbox: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for v in range(n):
            if settle_round[v] == 0:
                for u in g.adj[v]:
                    inbox[u].append(key[v])
                    messages += 1
        for v in range(n):
            if settle_round[v] == 0 and all(k > key[v] for k in inbox[v]):
                pivot_round[v] = t
                settle_round[v] = t
        snapshot()
        # Pivot round: fresh pivots announce; unsettled neighbors settle.
        rounds += 1
        for p in range(n):
            if pivot_round[p] == t:
                for u in g.adj[p]:
                    messages += 1
                    if best_pivot[u] < 0 or key[p] < key[best_pivot[u]]:
                        best_pivot[u] = p
                    if settle_round[u] == 0:
                        settle_round[u] = t
        snapshot()
    # Closing round: everyone reports status; registers settle the clusters.
    rounds += 1
    for v in range(n):
        sv = status(v)
        for u in g.adj[v]:
            messages += 1
            if sv == TAG_PIVOT:
                if best_pivot[u] < 0 or key[v] < key[best_pivot[u]]:
                    best_pivot[u] = v
            elif sv == TAG_UNSETTLED and key[v] < best_unsettled_key[u]:
                best_unsettled_key[u] = key[v]
    snapshot()
    cluster_pivot = [-1] * n
    for v in range(n):
        if pivot_round[v] > 0:
            cluster_pivot[v] = v
        elif best_pivot[v] >= 0 and key[best_pivot[v]] < best_unsettled_key[v]:
            cluster_pivot[v] = best_pivot[v]
    clustering, pivots = assemble_clustering(n, key, cluster_pivot)
    state = RPivotState(
        r=r,
        clustering=clustering,
        pivots=pivots,
        settle_round=tuple(settle_round),
        pivot_round=tuple(pivot_round),
        cluster_pivot=tuple(cluster_pivot),
    )
    report = LocalReport(
        n=n,
        r=r,
        rounds=rounds,
        messages_sent=messages,
        max_message_bits=msg_bits if messages else 0,
        rank_bits=rank_bits,
        state_history=tuple(history),
    )
    if rounds != 2 * r + 1:
        raise AssertionError(f"round budget violated: {rounds} != {2 * r + 1}")
    return state, report


# ---------------------------------------------------------------------------
# capacity-bounded machine sharding


@dataclass(frozen=True)
class MpcReport:
    """Accounting for one sharded run.

    Each primitive (join, aggregate, reduce over all machines) books
    ceil(1/delta) synchronous rounds, the cost of a capacity-S sort or
    combiner tree.  ``peak_machine_words`` is the largest resident word count
    of any machine, checked against the capacity S = ceil(n^delta).
    """

    n: int
    m: int
    r: int
    delta: float
    capacity: int
    vertex_machines: int
    edge_machines: int
    primitive_count: int
    booked_rounds: int
    peak_machine_words: int


def mpc_execute(
    g: Graph, ranks: RankAssignment, r: int, delta: float = 0.5
) -> tuple[RPivotState, MpcReport]:
    """Truncated clustering on machines holding ceil(n^delta) words each.

    Vertices are sharded four words apiece (rank, settle round, pivot round,
    scratch minimum); edges two words apiece plus two boundary words per
    machine.  Each round runs five primitives: join vertex state onto edges,
    aggregate per-endpoint minima, reduce minima and mark pivots, join fresh
    pivot flags, reduce settle notices.  Cluster formation adds three more.
    Shuffles combine en route, so no machine ever holds more than its
    capacity; the combiner depth is what the per-primitive round booking
    pays for.

    No machine can hold a global permutation, so ranks must be the integer
    kind drawn independently per vertex.
    """
    if ranks.kind is not RankKind.INTEGER:
        raise ValueError("mpc_execute needs integer ranks")
    if ranks.n != g.n:
        raise ValueError("ranks and graph disagree on n")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    if not (0 < delta <= 1):
        raise ValueError(f"need 0 < delta <= 1, got {delta}")
    n = g.n
    capacity = max(1, math.ceil(n**delta))
    if capacity < 4:
        raise ValueError(
            f"machine capacity shortfall: S=ceil(n^delta)={capacity} < 4 words "
            f"cannot hold one vertex record (n={n}, delta={delta})"
        )
    key = _keys(ranks)
    verts_per = capacity // 4
    edges_per = max(1, (capacity - 2) // 2)
    vm_of = [v // verts_per for v in range(n)]
    num_vm = (n + verts_per - 1) // verts_per if n else 1
    edge_list = list(g.edges())
    m = len(edge_list)
    num_em = max(1, (m + edges_per - 1) // edges_per)
    em_edges = [
        edge_list[i * edges_per : (i + 1) * edges_per] for i in range(num_em)
    ]
    # Resident state per vertex machine: 4 words per vertex.
    settle_round = [0] * n
    pivot_round = [0] * n
    primitive_count = 0
    peak = 0

    def run_primitive(resident_words: Iterable[int]) -> None:
        nonlocal primitive_count, peak
        primitive_count += 1
        worst = max(resident_words, default=0)
        peak = max(peak, worst)
        if worst > capacity:
            raise AssertionError(
                f"machine over capacity: {worst} > {capacity} words"
            )

    vm_words = [
        4 * sum(1 for v in range(n) if vm_of[v] == i) for i in range(num_vm)
    ]
    em_words = [2 * len(es) + 2 for es in em_edges]
    for t in range(1, r + 1):
        # 1: join current vertex state onto edge shards.
        run_primitive(em_words)
        # 2: per-shard partial minima of unsettled neighbor keys.
        partial: list[dict[int, tuple[int, int]]] = []
        for es in em_edges:
            local: dict[int, tuple[int, int]] = {}
            for u, v in es:
                if settle_round[u] == 0 and (v not in local or key[u] < local[v]):
                    local[v] = key[u]
                if settle_round[v] == 0 and (u not in local or key[v] < local[u]):
                    local[u] = key[v]
            partial.append(local)
        run_primitive(em_words)
        # 3: combine partials at vertex machines, mark this round's pivots.
        eta = [key[v] if settle_round[v] == 0 else _INF_KEY for v in range(n)]
        for local in partial:
            for v, k in local.items():
                if k < eta[v]:
                    eta[v] = k
        fresh = []
        for v in range(n):
            if settle_round[v] == 0 and eta[v] == key[v]:
                pivot_round[v] = t
                settle_round[v] = t
                fresh.append(v)
        run_primitive(vm_words)
        # 4: join fresh pivot flags back onto edge shards.
        fresh_set = set(fresh)
        run_primitive(em_words)
        # 5: settle notices reduced at vertex machines.
        notices: set[int] = set()
        for es in em_edges:
            for u, v in es:
                if u in fresh_set:
                    notices.add(v)
                if v in fresh_set:
                    notices.add(u)
        for v in notices:
            if settle_round[v] == 0:
                settle_round[v] = t
        run_primitive(vm_words)
    # Formation: join final state, aggregate per-endpoint best registers,
    # reduce to cluster choices.
    run_primitive(em_words)
    best_pivot = [-1] * n
    best_unsettled_key: list[tuple] = [_INF_KEY] * n
    for es in em_edges:
        for u, v in es:
            for a, b in ((u, v), (v, u)):
                if pivot_round[a] > 0:
                    if best_pivot[b] < 0 or key[a] < key[best_pivot[b]]:
                        best_pivot[b] = a
                elif settle_round[a] == 0 and key[a] < best_unsettled_key[b]:
                    best_unsettled_key[b] = key[a]
    run_primitive(em_words)
    cluster_pivot = [-1] * n
    for v in range(n):
        if pivot_round[v] > 0:
            cluster_pivot[v] = v
        elif best_pivot[v] >= 0 and key[best_pivot[v]] < best_unsettled_key[v]:
            cluster_pivot[v] = best_pivot[v]
    run_primitive(vm_words)
    clustering, pivots = assemble_clustering(n, key, cluster_pivot)
    state = RPivotState(
        r=r,
        clustering=clustering,
        pivots=pivots,
        settle_round=tuple(settle_round),
        pivot_round=tuple(pivot_round),
        cluster_pivot=tuple(cluster_pivot),
    )
    rounds_per_primitive = math.ceil(1 / delta)
    report = MpcReport(
        n=n,
        m=m,
        r=r,
        delta=delta,
        capacity=capacity,
        vertex_machines=num_vm,
        edge_machines=num_em,
        primitive_count=primitive_count,
        booked_rounds=primitive_count * rounds_per_primitive,
        peak_machine_words=peak,
    )
    return state, report


# ---------------------------------------------------------------------------
# bounded-radius probe answers


@dataclass(frozen=True)
class LcaAnswer:
    """Per-vertex answer computed from a bounded ball of adjacency probes.

    ``cluster_pivot`` is the pivot of v's cluster, v itself when v is a
    pivot, or -1 when v ends up a non-pivot singleton.  ``probes`` counts
    degree probes plus neighbor-list probes.
    """

    vertex: int
    is_pivot: bool
    settled: bool
    cluster_pivot: int
    probes: int
    ball_size: int


def lca_query(
    g: Graph, ranks: RankAssignment, r: int, v: int
) -> LcaAnswer:
    """Answer one vertex's truncated-clustering outcome from local probes.

    Collects the radius-(2r+2) ball by expanding every vertex within
    distance 2r+1 (one degree probe plus one probe per neighbor), simulates
    the rounds on the ball, and forms v's cluster choice.  Statuses at the
    ball boundary may be wrong, but they are too far away to influence v.

    Ranks must come from the per-vertex integer draw: a probe answerer can
    learn a vertex's own rank but not a globally consistent permutation.
    """
    if ranks.kind is not RankKind.INTEGER:
        raise ValueError("lca_query needs integer ranks")
    if not (0 <= v < g.n):
        raise ValueError(f"vertex {v} outside [0, {g.n})")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    key = _keys(ranks)
    expand_limit = 2 * r + 1
    probes = 0
    dist = {v: 0}
    order = [v]
    frontier = deque([v])
    edges: set[tuple[int, int]] = set()
    while frontier:
        x = frontier.popleft()
        if dist[x] > expand_limit:
            continue
        probes += 1  # degree probe
        for u in g.adj[x]:
            probes += 1  # neighbor probe
            a, b = (x, u) if x < u else (u, x)
            edges.add((a, b))
            if u not in dist:
                dist[u] = dist[x] + 1
                order.append(u)
                frontier.append(u)
    local_id = {x: i for i, x in enumerate(order)}
    ln = len(order)
    ladj: list[list[int]] = [[] for _ in range(ln)]
    for a, b in edges:
        ladj[local_id[a]].append(local_id[b])
        ladj[local_id[b]].append(local_id[a])
    lkey = [key[x] for x in order]
    settle = [0] * ln
    pivot = [0] * ln
    for t in range(1, r + 1):
        fresh = [
            x
            for x in range(ln)
            if settle[x] == 0
            and all(settle[u] != 0 or lkey[u] > lkey[x] for u in ladj[x])
        ]
        for p in fresh:
            pivot[p] = t
            settle[p] = t
            for u in ladj[p]:
                if settle[u] == 0:
                    settle[u] = t
    lv = local_id[v]
    if pivot[lv] > 0:
        cp = v
    else:
        best_p = -1
        kp = None
        kw = None
        for u in ladj[lv]:
            ku = lkey[u]
            if pivot[u] > 0:
                if kp is None or ku < kp:
                    best_p, kp = order[u], ku
            elif settle[u] == 0:
                if kw is None or ku < kw:
                    kw = ku
        cp = best_p if kp is not None and (kw is None or kw > kp) else -1
    return LcaAnswer(
        vertex=v,
        is_pivot=pivot[lv] > 0,
        settled=settle[lv] > 0,
        cluster_pivot=cp,
        probes=probes,
        ball_size=ln,
    )


def lca_cluster_all(
    g: Graph, ranks: RankAssignment, r: int
) -> tuple[RPivotState, list[LcaAnswer]]:
    """Assemble every vertex's probe answer into one canonical clustering.

    Settle and pivot rounds in the returned state are coarse (0 or 1 flags
    from the per-vertex answers), since individual queries do not report
    round numbers for other vertices.
    """
    answers = [lca_query(g, ranks, r, v) for v in range(g.n)]
    key = _keys(ranks)
    cluster_pivot = [a.cluster_pivot for a in answers]
    clustering, pivots = assemble_clustering(g.n, key, cluster_pivot)
    state = RPivotState(
        r=r,
        clustering=clustering,
        pivots=pivots,
        settle_round=tuple(1 if a.settled else 0 for a in answers),
        pivot_round=tuple(1 if a.is_pivot else 0 for a in answers),
        cluster_pivot=tuple(cluster_pivot),
    )
    return state, answers
