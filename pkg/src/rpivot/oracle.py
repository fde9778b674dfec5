"""Query oracles for pivot membership, literal recursion traces, and the
bad-triangle charging scheme.

``Vertex(v)`` asks whether v would be a pivot: it queries v's lower-rank
neighbors in ascending rank order, recursing, and answers 1 iff none of them
is a pivot.  ``Pair(u, v)`` runs the same loop over the merged lower-rank
neighborhoods of u and v.  Boolean mode memoizes per-vertex answers; full
trace mode replays the unmemoized recursion with an explicit stack and
records every push and pop as a snapshot, optionally stopping the first time
the stack holds ``stack_limit`` vertices.

The charging scheme turns each extra mistake of a truncated run into a bad
triangle: take the recursion stack of the pair the first time it holds a
chosen number of vertices, prepend the pair so that consecutive path entries
are adjacent, and charge the last three vertices.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .errors import ClaimViolation, QueryBudgetExceeded
from .graph import Graph, RankAssignment, make_rng, random_permutation, substream
from .pivot import ExtraMistakes, extra_mistakes

__all__ = [
    "DEFAULT_QUERY_BUDGET",
    "PivotOracle",
    "QueryTrace",
    "StackPath",
    "ChargeRecord",
    "WidthStudyResult",
    "vertex_oracle",
    "pair_oracle",
    "direct_queries",
    "direct_queries_pair",
    "direct_query_case",
    "validate_trace",
    "stack_path",
    "charge",
    "charging_round",
    "width_study",
    "trace_to_json",
]

DEFAULT_QUERY_BUDGET = 10_000_000

TraceMode = Literal["boolean", "full"]


class PivotOracle:
    """Memoized boolean oracle plus shared structure for one (graph, ranks).

    Safe to reuse across many vertex and pair queries; answers do not depend
    on query order because each vertex's pivot status is unique.
    """

    def __init__(self, g: Graph, ranks: RankAssignment):
        if ranks.n != g.n:
            raise ValueError("ranks and graph disagree on n")
        self.g = g
        self.ranks = ranks
        key = [(r, v) for v, r in enumerate(ranks.ranks)]
        self._key = key
        self._memo: list[bool | None] = [None] * g.n
        self._children: list[list[int] | None] = [None] * g.n

    def key(self, v: int) -> tuple[int, int]:
        return self._key[v]

    def children(self, v: int) -> list[int]:
        """Lower-key neighbors of v in ascending key order."""
        ch = self._children[v]
        if ch is None:
            key = self._key
            kv = key[v]
            ch = sorted((u for u in self.g.adj[v] if key[u] < kv), key=key.__getitem__)
            self._children[v] = ch
        return ch

    def pair_candidates(self, u: int, v: int) -> list[int]:
        """Merged neighbors of u and v below min(key(u), key(v)), ascending."""
        key = self._key
        cut = min(key[u], key[v])
        cand = {z for z in self.g.adj[u] if key[z] < cut}
        cand.update(z for z in self.g.adj[v] if key[z] < cut)
        return sorted(cand, key=key.__getitem__)

    def query(self, v: int) -> bool:
        """Memoized pivot-membership answer for v."""
        memo = self._memo
        got = memo[v]
        if got is not None:
            return got
        stack = [[v, 0]]
        while stack:
            frame = stack[-1]
            x = frame[0]
            if memo[x] is not None:
                stack.pop()
                continue
            ch = self.children(x)
            i = frame[1]
            moved = False
            while i < len(ch):
                w = ch[i]
                mw = memo[w]
                if mw is None:
                    frame[1] = i
                    stack.append([w, 0])
                    moved = True
                    break
                if mw:
                    memo[x] = False
                    stack.pop()
                    moved = True
                    break
                i += 1
            if not moved:
                memo[x] = True
                stack.pop()
        return bool(memo[v])

    def pivot_in_closed_neighborhood(self, v: int) -> int:
        """Minimum-key pivot among v and its neighbors."""
        if self.query(v):
            return v
        key = self._key
        best = -1
        kb = None
        for u in self.g.adj[v]:
            ku = key[u]
            if (kb is None or ku < kb) and self.query(u):
                best, kb = u, ku
        if best < 0:
            raise ClaimViolation(
                f"non-pivot {v} has no pivot neighbor (n={self.g.n})"
            )
        return best

    def queries_directly(self, x: int, w: int) -> bool:
        """Would Vertex(x) issue a direct query to w?"""
        if not self.g.has_edge(x, w):
            return False
        key = self._key
        if key[w] >= key[x]:
            return False
        if self.query(x):
            return True
        return key[w] <= key[self.pivot_in_closed_neighborhood(x)]


@dataclass(frozen=True)
class QueryTrace:
    """Recorded recursion of one traced oracle call.

    ``events`` holds the stack after every push or pop, beginning with the
    empty stack and excluding the root query itself.  ``result`` is None iff
    the trace stopped early at ``truncated_at``.  ``direct_query_count`` is
    the total number of vertex-oracle invocations anywhere in the recursion.
    """

    root: tuple[str, tuple[int, ...]]
    events: tuple[tuple[int, ...], ...]
    result: bool | None
    direct_query_count: int
    truncated_at: int | None = None

    def first_event_of_size(self, size: int) -> tuple[int, ...] | None:
        for snap in self.events:
            if len(snap) == size:
                return snap
        return None


def _traced_run(
    oracle: PivotOracle,
    roots: list[int],
    stack_limit: int | None,
    budget: int,
) -> tuple[bool | None, list[tuple[int, ...]], int, int | None]:
    if stack_limit is not None and stack_limit < 1:
        raise ValueError(f"stack limit must be >= 1, got {stack_limit}")
    children = oracle.children
    events: list[tuple[int, ...]] = [()]
    svert: list[int] = []
    frames: list[list] = [[roots, 0]]
    queries = 0
    ret: int | None = None
    while frames:
        frame = frames[-1]
        if ret is not None:
            val, ret = ret, None
            if val:
                # A child answered 1, so this call answers 0 immediately.
                frames.pop()
                if not frames:
                    return False, events, queries, None
                svert.pop()
                events.append(tuple(svert))
                ret = 0
                continue
        kids, i = frame
        if i < len(kids):
            w = kids[i]
            frame[1] = i + 1
            queries += 1
            if queries > budget:
                raise QueryBudgetExceeded(
                    f"trace exceeded {budget} direct queries (n={oracle.g.n})"
                )
            svert.append(w)
            events.append(tuple(svert))
            if stack_limit is not None and len(svert) == stack_limit:
                return None, events, queries, stack_limit
            frames.append([children(w), 0])
        else:
            frames.pop()
            if not frames:
                return True, events, queries, None
            svert.pop()
            events.append(tuple(svert))
            ret = 1
    raise AssertionError("trace loop exited without a result")


def vertex_oracle(
    g: Graph,
    ranks: RankAssignment,
    v: int,
    trace_mode: TraceMode = "boolean",
    stack_limit: int | None = None,
    query_budget: int = DEFAULT_QUERY_BUDGET,
    oracle: PivotOracle | None = None,
) -> tuple[bool | None, QueryTrace | None]:
    """Pivot-membership query for one vertex.

    Boolean mode returns (answer, None) using the memoized oracle.  Full mode
    replays the literal recursion and returns (answer, trace); with a
    ``stack_limit`` the answer is None when the trace stops early.
    """
    if not (0 <= v < g.n):
        raise ValueError(f"vertex {v} outside [0, {g.n})")
    orc = oracle if oracle is not None else PivotOracle(g, ranks)
    if trace_mode == "boolean":
        return orc.query(v), None
    result, events, queries, truncated = _traced_run(
        orc, orc.children(v), stack_limit, query_budget
    )
    trace = QueryTrace(
        root=("vertex", (v,)),
        events=tuple(events),
        result=result,
        direct_query_count=queries,
        truncated_at=truncated,
    )
    return result, trace


def pair_oracle(
    g: Graph,
    ranks: RankAssignment,
    u: int,
    v: int,
    trace_mode: TraceMode = "boolean",
    stack_limit: int | None = None,
    query_budget: int = DEFAULT_QUERY_BUDGET,
    oracle: PivotOracle | None = None,
) -> tuple[bool | None, QueryTrace | None]:
    """Merged-neighborhood query for a pair; 1 iff no candidate is a pivot."""
    if u == v:
        raise ValueError("pair oracle needs two distinct vertices")
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise ValueError(f"pair ({u}, {v}) outside [0, {g.n})")
    orc = oracle if oracle is not None else PivotOracle(g, ranks)
    if trace_mode == "boolean":
        for w in orc.pair_candidates(u, v):
            if orc.query(w):
                return False, None
        return True, None
    result, events, queries, truncated = _traced_run(
        orc, orc.pair_candidates(u, v), stack_limit, query_budget
    )
    trace = QueryTrace(
        root=("pair", (u, v)),
        events=tuple(events),
        result=result,
        direct_query_count=queries,
        truncated_at=truncated,
    )
    return result, trace


def direct_queries(
    g: Graph,
    ranks: RankAssignment,
    v: int,
    oracle: PivotOracle | None = None,
) -> list[int]:
    """Exactly the vertices Vertex(v) queries directly, in query order."""
    orc = oracle if oracle is not None else PivotOracle(g, ranks)
    out: list[int] = []
    for w in orc.children(v):
        out.append(w)
        if orc.query(w):
            break
    return out


def direct_queries_pair(
    g: Graph,
    ranks: RankAssignment,
    u: int,
    v: int,
    oracle: PivotOracle | None = None,
) -> list[int]:
    """Exactly the vertices Pair(u, v) queries directly, in query order."""
    orc = oracle if oracle is not None else PivotOracle(g, ranks)
    out: list[int] = []
    for w in orc.pair_candidates(u, v):
        out.append(w)
        if orc.query(w):
            break
    return out


def direct_query_case(
    g: Graph,
    ranks: RankAssignment,
    target: int | tuple[int, int],
    oracle: PivotOracle | None = None,
) -> str:
    """Validate the direct-query set against its closed-form description.

    Vertices: a pivot queries all of its lower-rank neighbors and none of
    them is a pivot; a non-pivot queries exactly the neighbors up to and
    including its cluster pivot, which is the only pivot queried.  Pairs
    whose endpoints share a full-run pivot: if the shared pivot is an
    endpoint, every candidate is queried and none is a pivot; otherwise the
    queried set stops exactly at the shared pivot.  Returns a case tag;
    raises :class:`ClaimViolation` on any mismatch.
    """
    orc = oracle if oracle is not None else PivotOracle(g, ranks)
    key = orc.key
    if isinstance(target, tuple):
        u, v = target
        pu = orc.pivot_in_closed_neighborhood(u)
        pv = orc.pivot_in_closed_neighborhood(v)
        if pu != pv:
            raise ValueError(
                f"pair ({u}, {v}) endpoints have distinct pivots {pu}, {pv}"
            )
        p = pu
        got = direct_queries_pair(g, ranks, u, v, oracle=orc)
        cand = orc.pair_candidates(u, v)
        if p == u or p == v:
            expected = cand
            tag = "pair-pivot-endpoint"
            if any(orc.query(z) for z in got):
                raise ClaimViolation(
                    f"pair ({u}, {v}) with endpoint pivot queried a pivot"
                )
        else:
            kp = key(p)
            expected = [z for z in cand if key(z) <= kp]
            tag = "pair-shared-pivot"
            pivots_seen = [z for z in got if orc.query(z)]
            if pivots_seen != [p]:
                raise ClaimViolation(
                    f"pair ({u}, {v}) queried pivots {pivots_seen}, expected [{p}]"
                )
        if got != expected:
            raise ClaimViolation(
                f"pair ({u}, {v}) direct queries {got} != expected {expected}"
            )
        return tag
    v = target
    got = direct_queries(g, ranks, v, oracle=orc)
    if orc.query(v):
        expected = orc.children(v)
        if any(orc.query(z) for z in got):
            raise ClaimViolation(f"pivot {v} queried another pivot")
        tag = "vertex-pivot"
    else:
        p = orc.pivot_in_closed_neighborhood(v)
        kp = key(p)
        expected = [z for z in orc.children(v) if key(z) <= kp]
        pivots_seen = [z for z in got if orc.query(z)]
        if pivots_seen != [p]:
            raise ClaimViolation(
                f"non-pivot {v} queried pivots {pivots_seen}, expected [{p}]"
            )
        tag = "vertex-non-pivot"
    if got != expected:
        raise ClaimViolation(
            f"vertex {v} direct queries {got} != expected {expected}"
        )
    return tag


def validate_trace(g: Graph, ranks: RankAssignment, trace: QueryTrace) -> None:
    """Replay a trace's structural invariants; raises on any violation."""
    kind, who = trace.root
    key = [(r, v) for v, r in enumerate(ranks.ranks)]
    if kind == "vertex":
        (rv,) = who
        root_cut = key[rv]
        root_nbrs = g.nbr_sets[rv]
    else:
        u, v = who
        root_cut = min(key[u], key[v])
        root_nbrs = g.nbr_sets[u] | g.nbr_sets[v]
    events = trace.events
    if not events or events[0] != ():
        raise ClaimViolation("trace must begin with the empty stack")
    for prev, cur in zip(events, events[1:]):
        if len(cur) == len(prev) + 1 and cur[:-1] == prev:
            w = cur[-1]
            if len(prev) == 0:
                if w not in root_nbrs or key[w] >= root_cut:
                    raise ClaimViolation(
                        f"bottom push {w} is not a valid root candidate"
                    )
            else:
                below = prev[-1]
                if w not in g.nbr_sets[below] or key[w] >= key[below]:
                    raise ClaimViolation(
                        f"push {w} is not a lower-rank neighbor of {below}"
                    )
        elif len(cur) == len(prev) - 1 and prev[:-1] == cur:
            continue
        else:
            raise ClaimViolation("consecutive snapshots must differ by one push or pop")
    if trace.truncated_at is not None:
        if trace.result is not None:
            raise ClaimViolation("truncated trace must carry no result")
        if len(events[-1]) != trace.truncated_at:
            raise ClaimViolation("truncated trace must end at the stated size")
        if any(len(s) >= trace.truncated_at for s in events[:-1]):
            raise ClaimViolation("trace passed the stated size before stopping")
    elif trace.result is None:
        raise ClaimViolation("completed trace must carry a result")


@dataclass(frozen=True)
class StackPath:
    """Adjacent-vertex path built from a pair trace snapshot.

    ``vertices`` is the snapshot with the queried pair prepended, ordered so
    that the second entry is the endpoint that directly queries the first
    stack vertex.  Consecutive vertices are adjacent and ranks strictly
    descend from the second entry on.
    """

    pair: tuple[int, int]
    ell: int
    vertices: tuple[int, ...]
    snapshot: tuple[int, ...]

    def last_three(self) -> tuple[int, int, int]:
        a, b, c = self.vertices[-3:]
        return (a, b, c)


def _order_pair_for_path(
    orc: PivotOracle, u: int, v: int, w1: int
) -> tuple[int, int]:
    qu = orc.queries_directly(u, w1)
    qv = orc.queries_directly(v, w1)
    if qu and not qv:
        return (v, u)
    if qv and not qu:
        return (u, v)
    if qu and qv:
        # Queried by both: the lower-rank endpoint sits next to the stack so
        # that ranks still descend along the path.  The rank order not fixed
        # by the pseudocode is handled symmetrically.
        if orc.key(u) < orc.key(v):
            return (v, u)
        return (u, v)
    raise ClaimViolation(
        f"stack bottom {w1} is directly queried by neither endpoint of "
        f"({u}, {v})"
    )


def _validate_path(orc: PivotOracle, path: StackPath) -> None:
    vs = path.vertices
    g = orc.g
    for a, b in zip(vs, vs[1:]):
        if not g.has_edge(a, b):
            raise ClaimViolation(f"path entries {a}, {b} are not adjacent")
    for a, b in zip(vs[1:], vs[2:]):
        if orc.key(b) >= orc.key(a):
            raise ClaimViolation(
                f"ranks fail to descend from the second path entry: {a} -> {b}"
            )


def stack_path(
    g: Graph,
    ranks: RankAssignment,
    u: int,
    v: int,
    ell: int,
    oracle: PivotOracle | None = None,
    trace: QueryTrace | None = None,
    query_budget: int = DEFAULT_QUERY_BUDGET,
) -> StackPath:
    """Pair recursion stack the first time it holds ``ell`` vertices, with
    the pair prepended.

    The pair must be an extra mistake of some truncated run with
    ``2 <= ell <= 2r``; for such pairs the stack provably reaches ``ell``,
    and failure to do so raises :class:`ClaimViolation`.  A precomputed
    ``trace`` with a deeper stack limit may be supplied; its prefix up to the
    first arrival at ``ell`` is identical to a fresh run.
    """
    if ell < 2:
        raise ValueError(f"need ell >= 2, got {ell}")
    orc = oracle if oracle is not None else PivotOracle(g, ranks)
    snap: tuple[int, ...] | None
    if trace is not None:
        snap = trace.first_event_of_size(ell)
    else:
        _, fresh = pair_oracle(
            g,
            ranks,
            u,
            v,
            trace_mode="full",
            stack_limit=ell,
            query_budget=query_budget,
            oracle=orc,
        )
        assert fresh is not None
        snap = fresh.events[-1] if fresh.truncated_at == ell else None
    if snap is None or len(snap) != ell:
        raise ClaimViolation(
            f"pair ({u}, {v}) recursion stack never reached {ell} vertices"
        )
    first, second = _order_pair_for_path(orc, u, v, snap[0])
    path = StackPath(
        pair=(u, v), ell=ell, vertices=(first, second) + snap, snapshot=snap
    )
    _validate_path(orc, path)
    return path


@dataclass(frozen=True)
class ChargeRecord:
    """One extra-mistake pair charged to a bad triangle.

    ``triangle`` keeps path order: the first two entries and the last two
    entries are edges, the outer pair is the non-edge.
    """

    pair: tuple[int, int]
    ell: int
    triangle: tuple[int, int, int]


def charge(
    g: Graph,
    ranks: RankAssignment,
    u: int,
    v: int,
    ell: int,
    oracle: PivotOracle | None = None,
    trace: QueryTrace | None = None,
) -> ChargeRecord:
    """Charge pair (u, v) at depth ``ell`` to the last three path vertices."""
    path = stack_path(g, ranks, u, v, ell, oracle=oracle, trace=trace)
    a, b, c = path.last_three()
    if not (g.has_edge(a, b) and g.has_edge(b, c)) or g.has_edge(a, c):
        raise ClaimViolation(
            f"charged triple ({a}, {b}, {c}) for pair ({u}, {v}) at depth "
            f"{ell} is not a bad triangle"
        )
    return ChargeRecord(pair=(u, v), ell=ell, triangle=(a, b, c))


def charging_round(
    g: Graph,
    ranks: RankAssignment,
    r: int,
    seed: int | np.random.Generator,
    mistakes: ExtraMistakes | None = None,
    oracle: PivotOracle | None = None,
) -> list[ChargeRecord]:
    """Charge every extra mistake of one run at a single shared random depth.

    The depth is drawn once, uniformly from [2, 2r], and reused for all pairs
    of the run.
    """
    rng = make_rng(seed)
    ell = int(rng.integers(2, 2 * r + 1))
    xm = mistakes if mistakes is not None else extra_mistakes(g, ranks, r)
    orc = oracle if oracle is not None else PivotOracle(g, ranks)
    return [charge(g, ranks, u, v, ell, oracle=orc) for u, v in xm.pairs]


@dataclass(frozen=True)
class WidthStudyResult:
    """Per-pair charging statistics over many sampled permutations.

    ``mean_charges[a][b]`` estimates how often one charging round lands on a
    bad triangle containing both a and b.  ``mean_paths`` counts, over all
    depths in [2, 2r] rather than the sampled one, charged triples whose path
    order passes a directly before b (edges) or a before b around the center
    (non-edges); it is directed.
    """

    n: int
    r: int
    trials: int
    seed: int
    is_edge: np.ndarray = field(repr=False)
    mean_charges: np.ndarray = field(repr=False)
    stderr_charges: np.ndarray = field(repr=False)
    mean_paths: np.ndarray = field(repr=False)
    stderr_paths: np.ndarray = field(repr=False)

    def rows(self) -> list[dict]:
        out = []
        for a in range(self.n):
            for b in range(a + 1, self.n):
                out.append(
                    {
                        "a": a,
                        "b": b,
                        "is_edge": int(self.is_edge[a, b]),
                        "mean_charges": float(self.mean_charges[a, b]),
                        "stderr": float(self.stderr_charges[a, b]),
                        "trials": self.trials,
                        "mean_paths_ab": float(self.mean_paths[a, b]),
                        "stderr_paths_ab": float(self.stderr_paths[a, b]),
                        "mean_paths_ba": float(self.mean_paths[b, a]),
                        "stderr_paths_ba": float(self.stderr_paths[b, a]),
                    }
                )
        return out

    def write_csv(self, path: str | Path) -> None:
        rows = self.rows()
        with open(path, "w", newline="") as fh:
            fh.write("# schema rpivot/width-v1\n")
            fh.write(f"# n={self.n} r={self.r} trials={self.trials} seed={self.seed}\n")
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)

    def max_mean_charges(self) -> float:
        return float(self.mean_charges.max()) if self.n > 1 else 0.0


def _width_accumulate(
    g: Graph,
    r: int,
    seed: int,
    trial_lo: int,
    trial_hi: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = g.n
    charge_sum = np.zeros((n, n), dtype=np.float64)
    charge_sq = np.zeros((n, n), dtype=np.float64)
    path_sum = np.zeros((n, n), dtype=np.float64)
    path_sq = np.zeros((n, n), dtype=np.float64)
    depth_span = 2 * r
    for t in range(trial_lo, trial_hi):
        rng = substream(seed, t)
        ranks = random_permutation(n, rng)
        ell_star = int(rng.integers(2, depth_span + 1))
        xm = extra_mistakes(g, ranks, r)
        if not xm.pairs:
            continue
        orc = PivotOracle(g, ranks)
        charges: dict[tuple[int, int], int] = {}
        paths: dict[tuple[int, int], int] = {}
        for u, v in xm.pairs:
            _, tr = pair_oracle(
                g, ranks, u, v, trace_mode="full", stack_limit=depth_span, oracle=orc
            )
            assert tr is not None
            for ell in range(2, depth_span + 1):
                rec = charge(g, ranks, u, v, ell, oracle=orc, trace=tr)
                a, b, c = rec.triangle
                paths[(a, b)] = paths.get((a, b), 0) + 1
                paths[(b, c)] = paths.get((b, c), 0) + 1
                paths[(a, c)] = paths.get((a, c), 0) + 1
                if ell == ell_star:
                    for x, y in ((a, b), (b, c), (a, c)):
                        k = (x, y) if x < y else (y, x)
                        charges[k] = charges.get(k, 0) + 1
        for (x, y), cnt in charges.items():
            charge_sum[x, y] += cnt
            charge_sq[x, y] += cnt * cnt
        for (x, y), cnt in paths.items():
            path_sum[x, y] += cnt
            path_sq[x, y] += cnt * cnt
    return charge_sum, charge_sq, path_sum, path_sq


def width_study(
    g: Graph,
    r: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> WidthStudyResult:
    """Monte-Carlo estimate of per-pair charging width and path counts.

    Each trial draws a fresh permutation and one shared depth, charges every
    extra mistake, and accumulates per-pair counts.  Trials use derived
    substreams, so results do not depend on ``threads``.
    """
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        bounds = np.linspace(0, trials, threads + 1, dtype=int)
        parts = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_width_accumulate, g, r, seed, int(lo), int(hi))
                for lo, hi in zip(bounds, bounds[1:])
                if hi > lo
            ]
            parts = [f.result() for f in futures]
        charge_sum = sum(p[0] for p in parts)
        charge_sq = sum(p[1] for p in parts)
        path_sum = sum(p[2] for p in parts)
        path_sq = sum(p[3] for p in parts)
    else:
        charge_sum, charge_sq, path_sum, path_sq = _width_accumulate(
            g, r, seed, 0, trials
        )
    T = trials
    mean_c = charge_sum / T
    var_c = np.maximum(charge_sq - charge_sum**2 / T, 0.0) / (T - 1)
    se_c = np.sqrt(var_c / T)
    mean_p = path_sum / T
    var_p = np.maximum(path_sq - path_sum**2 / T, 0.0) / (T - 1)
    se_p = np.sqrt(var_p / T)
    edge_mask = np.zeros((g.n, g.n), dtype=bool)
    for u, v in g.edges():
        edge_mask[u, v] = edge_mask[v, u] = True
    return WidthStudyResult(
        n=g.n,
        r=r,
        trials=trials,
        seed=seed,
        is_edge=edge_mask,
        mean_charges=mean_c,
        stderr_charges=se_c,
        mean_paths=mean_p,
        stderr_paths=se_p,
    )


def trace_to_json(trace: QueryTrace) -> dict:
    return {
        "schema": "rpivot/trace-v1",
        "root": {"kind": trace.root[0], "vertices": list(trace.root[1])},
        "events": [list(s) for s in trace.events],
        "result": trace.result,
        "direct_query_count": trace.direct_query_count,
        "truncated_at": trace.truncated_at,
    }
