"""Randomized self-checks with machine-readable reproducers.

Each check replays one structural claim (refinement, mistake accounting,
oracle agreement, stack charging, executor equivalence) over seeded random
instances.  A counterexample is reported as a JSON-ready dict carrying the
seed, trial index, instance parameters, edge list, and the offending vertex
or pair, so the failure can be replayed in isolation.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import permutations
from typing import Callable

from .errors import ClaimViolation
from .generators import erdos_renyi, small_graphs
from .graph import (
    Clustering,
    Graph,
    RankAssignment,
    RankKind,
    clustering_cost,
    is_refinement,
    random_integer_ranks,
    random_permutation,
    same_partition,
    substream,
)
from .executors import (
    lca_cluster_all,
    local_execute,
    mpc_execute,
    streaming_execute,
)
from .oracle import (
    PivotOracle,
    charge,
    direct_query_case,
    pair_oracle,
    validate_trace,
    vertex_oracle,
)
from .pivot import (
    extra_mistakes,
    parallel_pivot_full,
    r_pivot,
    r_pivot_variant,
    sequential_pivot,
)

__all__ = [
    "CheckOutcome",
    "VerifyReport",
    "SUITE_NAMES",
    "DEFAULT_BUDGET",
    "FAILURE_CAP",
    "run_suite",
    "invariant_checks",
    "oracle_checks",
    "executor_checks",
    "exhaustive_small_checks",
]

SUITE_NAMES = ("invariants", "oracle", "executors", "exhaustive", "all")
DEFAULT_BUDGET = 60
FAILURE_CAP = 3

_P_CHOICES = (0.2, 0.5, 0.8)


class _CheckFailure(Exception):
    """Internal: a claim mismatch found by a check body."""


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one named check: trial count plus captured reproducers."""

    name: str
    trials: int
    failures: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class VerifyReport:
    suite: str
    budget: int
    seed: int
    checks: tuple[CheckOutcome, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def summary_lines(self) -> list[str]:
        out = []
        for c in self.checks:
            if c.ok:
                out.append(f"PASS {c.name} (trials={c.trials})")
            else:
                out.append(
                    f"FAIL {c.name} (trials={c.trials}, failures={len(c.failures)})"
                )
        verdict = "PASS" if self.passed else "FAIL"
        out.append(f"{verdict} suite={self.suite} budget={self.budget} seed={self.seed}")
        return out

    def to_json(self) -> dict:
        return {
            "schema": "rpivot/verify-v1",
            "suite": self.suite,
            "budget": self.budget,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "trials": c.trials,
                    "ok": c.ok,
                    "failures": list(c.failures),
                }
                for c in self.checks
            ],
        }


def _run_check(
    name: str, seed: int, budget: int, body: Callable[[int, dict], None]
) -> CheckOutcome:
    """Run ``body`` once per trial; collect context dicts of failed trials.

    The body fills its context dict (instance parameters, edges, current
    vertex or pair) as it works, so whatever it was probing when it raised
    is already in the reproducer.
    """
    failures: list[dict] = []
    for t in range(budget):
        ctx: dict = {"check": name, "seed": seed, "trial": t}
        try:
            body(t, ctx)
        except (ClaimViolation, _CheckFailure, AssertionError) as exc:
            ctx["detail"] = str(exc)
            failures.append(ctx)
            if len(failures) >= FAILURE_CAP:
                break
    return CheckOutcome(name=name, trials=budget, failures=tuple(failures))


def _draw(seed: int, trial: int, ctx: dict, n_lo: int = 4, n_hi: int = 24):
    """One random (graph, permutation, r) instance, recorded into ctx."""
    rng = substream(seed, trial)
    n = int(rng.integers(n_lo, n_hi + 1))
    p = _P_CHOICES[int(rng.integers(len(_P_CHOICES)))]
    r = int(rng.integers(1, 4))
    g = erdos_renyi(n, p, rng)
    ranks = random_permutation(n, rng)
    ctx.update(n=n, p=p, r=r, edges=[list(e) for e in g.edges()])
    return g, ranks, r, rng


# ---------------------------------------------------------------------------
# invariants


def _body_refinement(seed):
    def body(t, ctx):
        g, ranks, r, _ = _draw(seed, t, ctx)
        xm = extra_mistakes(g, ranks, r)
        if not is_refinement(xm.rpivot_state.clustering, xm.pivot_run.clustering):
            raise _CheckFailure("truncated clustering does not refine the full run")

    return body


def _body_mistake_accounting(seed):
    def body(t, ctx):
        g, ranks, r, _ = _draw(seed, t, ctx)
        xm = extra_mistakes(g, ranks, r)
        fine = xm.rpivot_state.clustering.ids
        coarse = xm.pivot_run.clustering.ids
        for u, v in xm.pairs:
            ctx["pair"] = [u, v]
            if not g.has_edge(u, v):
                raise _CheckFailure(f"extra mistake ({u}, {v}) is not an edge")
            if coarse[u] != coarse[v]:
                raise _CheckFailure(
                    f"extra mistake ({u}, {v}) is not co-clustered by the full run"
                )
            if fine[u] == fine[v]:
                raise _CheckFailure(
                    f"extra mistake ({u}, {v}) is not separated by the truncated run"
                )
        ctx.pop("pair", None)
        repaired = sum(
            1
            for a in range(g.n)
            for b in range(a + 1, g.n)
            if coarse[a] == coarse[b] and fine[a] != fine[b] and not g.has_edge(a, b)
        )
        cost_fine = clustering_cost(g, xm.rpivot_state.clustering)
        cost_coarse = clustering_cost(g, xm.pivot_run.clustering)
        if cost_fine != cost_coarse + len(xm.pairs) - repaired:
            raise _CheckFailure(
                f"cost identity broken: {cost_fine} != {cost_coarse} + "
                f"{len(xm.pairs)} - {repaired}"
            )

    return body


def _body_parallel_sequential(seed):
    def body(t, ctx):
        g, ranks, _, _ = _draw(seed, t, ctx)
        seq = sequential_pivot(g, ranks)
        par = parallel_pivot_full(g, ranks)
        if seq.pivots != par.pivots:
            raise _CheckFailure(
                f"pivot sets differ: {seq.pivots} != {par.pivots}"
            )
        if seq.clustering != par.clustering or seq.pivot_of != par.pivot_of:
            raise _CheckFailure("parallel clustering differs from sequential")

    return body


def _body_variant_refines_full(seed, c):
    def body(t, ctx):
        g, _, r, rng = _draw(seed, t, ctx)
        iranks = random_integer_ranks(g.n, c, rng)
        ctx["ranks"] = list(iranks.ranks)
        state = r_pivot_variant(g, iranks, r)
        full = sequential_pivot(g, iranks)
        if not is_refinement(state.clustering, full.clustering):
            raise _CheckFailure(
                "integer-rank truncated clustering does not refine the full run"
            )

    return body


def invariant_checks(budget: int, seed: int, c: int = 3) -> list[CheckOutcome]:
    return [
        _run_check("refinement", seed, budget, _body_refinement(seed)),
        _run_check(
            "mistake-accounting", seed, budget, _body_mistake_accounting(seed)
        ),
        _run_check(
            "parallel-matches-sequential",
            seed,
            budget,
            _body_parallel_sequential(seed),
        ),
        _run_check(
            "variant-refines-full", seed, budget, _body_variant_refines_full(seed, c)
        ),
    ]


# ---------------------------------------------------------------------------
# oracle


def _body_vertex_oracle(seed):
    def body(t, ctx):
        g, ranks, _, _ = _draw(seed, t, ctx)
        orc = PivotOracle(g, ranks)
        pivots = set(sequential_pivot(g, ranks).pivots)
        for v in range(g.n):
            ctx["vertex"] = v
            ans, _ = vertex_oracle(g, ranks, v, oracle=orc)
            if ans != (v in pivots):
                raise _CheckFailure(
                    f"vertex oracle says {ans} but membership says {v in pivots}"
                )
            direct_query_case(g, ranks, v, oracle=orc)

    return body


def _body_pair_oracle(seed):
    def body(t, ctx):
        g, ranks, r, _ = _draw(seed, t, ctx)
        xm = extra_mistakes(g, ranks, r)
        orc = PivotOracle(g, ranks)
        for u, v in xm.pairs:
            ctx["pair"] = [u, v]
            ans, _ = pair_oracle(g, ranks, u, v, oracle=orc)
            p = xm.common_pivot[(u, v)]
            if ans != (p in (u, v)):
                raise _CheckFailure(
                    f"pair oracle says {ans} but the shared pivot is {p}"
                )
            direct_query_case(g, ranks, (u, v), oracle=orc)

    return body


def _body_stack_charges(seed):
    def body(t, ctx):
        g, ranks, r, _ = _draw(seed, t, ctx)
        xm = extra_mistakes(g, ranks, r)
        orc = PivotOracle(g, ranks)
        depth = 2 * r
        for u, v in xm.pairs:
            ctx["pair"] = [u, v]
            _, trace = pair_oracle(
                g, ranks, u, v, trace_mode="full", stack_limit=depth, oracle=orc
            )
            assert trace is not None
            if trace.truncated_at != depth:
                raise _CheckFailure(
                    f"pair recursion stack never reached {depth} vertices"
                )
            validate_trace(g, ranks, trace)
            for ell in range(2, depth + 1):
                ctx["ell"] = ell
                charge(g, ranks, u, v, ell, oracle=orc, trace=trace)
            ctx.pop("ell", None)

    return body


def _body_unsettled_depth(seed):
    def body(t, ctx):
        g, ranks, r, _ = _draw(seed, t, ctx)
        xm = extra_mistakes(g, ranks, r)
        depth = 2 * r
        for w in xm.rpivot_state.unsettled_after():
            ctx["vertex"] = w
            _, trace = vertex_oracle(
                g, ranks, w, trace_mode="full", stack_limit=depth
            )
            assert trace is not None
            if trace.truncated_at != depth:
                raise _CheckFailure(
                    f"unsettled vertex {w} has a recursion stack that stops "
                    f"before {depth}"
                )

    return body


def oracle_checks(budget: int, seed: int) -> list[CheckOutcome]:
    return [
        _run_check(
            "vertex-oracle-membership", seed, budget, _body_vertex_oracle(seed)
        ),
        _run_check(
            "pair-oracle-shared-pivot", seed, budget, _body_pair_oracle(seed)
        ),
        _run_check("stack-charges", seed, budget, _body_stack_charges(seed)),
        _run_check(
            "unsettled-stack-depth", seed, budget, _body_unsettled_depth(seed)
        ),
    ]


# ---------------------------------------------------------------------------
# executors


def _require_same(state_clustering: Clustering, ref: Clustering, label: str) -> None:
    if not same_partition(state_clustering, ref):
        raise _CheckFailure(f"{label} produced a different partition")
    if state_clustering != ref:
        raise _CheckFailure(f"{label} numbered an identical partition differently")


def _bfs_probe_bound(g: Graph, v: int, radius: int) -> int:
    """Probes a plain BFS ball oracle spends: expand every vertex within
    distance ``radius``, one degree probe plus one probe per neighbor."""
    dist = {v: 0}
    q = deque([v])
    cost = 0
    while q:
        w = q.popleft()
        if dist[w] > radius:
            continue
        cost += 1 + len(g.adj[w])
        for z in g.adj[w]:
            if z not in dist:
                dist[z] = dist[w] + 1
                q.append(z)
    return cost


def _body_streaming(seed, streaming_fn):
    def body(t, ctx):
        g, ranks, r, rng = _draw(seed, t, ctx)
        ref = r_pivot(g, ranks, r)
        edges = list(g.edges())
        order = list(edges)
        for attempt in range(2):
            if attempt == 1:
                perm = rng.permutation(len(order))
                order = [edges[i] for i in perm]
            ctx["shuffled"] = bool(attempt)
            state, rep = streaming_fn(order, g.n, ranks, r)
            _require_same(state.clustering, ref.clustering, "streaming")
            if state.pivots != ref.pivots:
                raise _CheckFailure("streaming pivot set differs")
            if rep.passes != 2 * r + 1:
                raise _CheckFailure(f"streaming used {rep.passes} passes")
            if rep.peak_words > 6 * g.n:
                raise _CheckFailure(
                    f"streaming held {rep.peak_words} words, over 6n = {6 * g.n}"
                )

    return body


def _body_local(seed, local_fn, c):
    def body(t, ctx):
        g, _, r, rng = _draw(seed, t, ctx)
        iranks = random_integer_ranks(g.n, c, rng)
        ctx["ranks"] = list(iranks.ranks)
        ref = r_pivot_variant(g, iranks, r)
        state, rep = local_fn(g, iranks, r)
        _require_same(state.clustering, ref.clustering, "message passing")
        if state.pivots != ref.pivots:
            raise _CheckFailure("message-passing pivot set differs")
        if rep.rounds != 2 * r + 1:
            raise _CheckFailure(f"message passing used {rep.rounds} rounds")
        if c == 3 and g.n >= 2:
            cap = 3 * math.ceil(math.log2(g.n)) + 8
            if rep.max_message_bits > cap:
                raise _CheckFailure(
                    f"messages carry {rep.max_message_bits} bits, over {cap}"
                )

    return body


def _body_mpc(seed, mpc_fn, c):
    def body(t, ctx):
        # delta = 0.3 needs ceil(n**0.3) >= 4, so draw larger graphs here.
        g, _, r, rng = _draw(seed, t, ctx, n_lo=40, n_hi=64)
        iranks = random_integer_ranks(g.n, c, rng)
        ctx["ranks"] = list(iranks.ranks)
        ref = r_pivot_variant(g, iranks, r)
        for delta in (0.3, 0.5):
            ctx["delta"] = delta
            state, rep = mpc_fn(g, iranks, r, delta)
            _require_same(state.clustering, ref.clustering, "sharded")
            if state.pivots != ref.pivots:
                raise _CheckFailure("sharded pivot set differs")
            if rep.peak_machine_words > rep.capacity:
                raise _CheckFailure(
                    f"a machine held {rep.peak_machine_words} words, over "
                    f"capacity {rep.capacity}"
                )

    return body


def _body_lca(seed, lca_fn, c):
    def body(t, ctx):
        g, _, r, rng = _draw(seed, t, ctx)
        iranks = random_integer_ranks(g.n, c, rng)
        ctx["ranks"] = list(iranks.ranks)
        ref = r_pivot_variant(g, iranks, r)
        state, answers = lca_fn(g, iranks, r)
        _require_same(state.clustering, ref.clustering, "probe answers")
        if state.pivots != ref.pivots:
            raise _CheckFailure("probe-answer pivot set differs")
        for a in answers:
            ctx["vertex"] = a.vertex
            bound = _bfs_probe_bound(g, a.vertex, 2 * r + 1)
            if a.probes > bound:
                raise _CheckFailure(
                    f"query spent {a.probes} probes, over the ball bound {bound}"
                )

    return body


def executor_checks(
    budget: int,
    seed: int,
    c: int = 3,
    overrides: dict[str, Callable] | None = None,
) -> list[CheckOutcome]:
    """Equivalence and resource checks for the four execution models.

    ``overrides`` swaps in replacement callables by name ("streaming",
    "local", "mpc", "lca"), which is how a deliberately broken executor is
    shown to fail with a reproducer.
    """
    ov = overrides or {}
    unknown = set(ov) - {"streaming", "local", "mpc", "lca"}
    if unknown:
        raise ValueError(f"unknown executor overrides: {sorted(unknown)}")
    streaming_fn = ov.get("streaming", streaming_execute)
    local_fn = ov.get("local", local_execute)
    mpc_fn = ov.get("mpc", mpc_execute)
    lca_fn = ov.get("lca", lca_cluster_all)
    return [
        _run_check(
            "streaming-matches-reference",
            seed,
            budget,
            _body_streaming(seed, streaming_fn),
        ),
        _run_check(
            "local-matches-variant", seed, budget, _body_local(seed, local_fn, c)
        ),
        _run_check("mpc-matches-variant", seed, budget, _body_mpc(seed, mpc_fn, c)),
        _run_check("lca-matches-variant", seed, budget, _body_lca(seed, lca_fn, c)),
    ]


# ---------------------------------------------------------------------------
# exhaustive small-n sweep


def _exhaustive_unit(
    g: Graph, perm: tuple[int, ...], rounds: tuple[int, ...], ctx: dict
) -> None:
    ranks = RankAssignment(RankKind.PERMUTATION, perm)
    orc = PivotOracle(g, ranks)
    full = sequential_pivot(g, ranks)
    pivots = set(full.pivots)
    for v in range(g.n):
        ctx["vertex"] = v
        ans, _ = vertex_oracle(g, ranks, v, oracle=orc)
        if ans != (v in pivots):
            raise _CheckFailure(
                f"vertex oracle says {ans} but membership says {v in pivots}"
            )
        direct_query_case(g, ranks, v, oracle=orc)
    ctx.pop("vertex", None)
    po = full.pivot_of
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if po[u] != po[v]:
                continue
            ctx["pair"] = [u, v]
            ans, _ = pair_oracle(g, ranks, u, v, oracle=orc)
            if ans != (po[u] in (u, v)):
                raise _CheckFailure(
                    f"pair oracle says {ans} but the shared pivot is {po[u]}"
                )
            direct_query_case(g, ranks, (u, v), oracle=orc)
    ctx.pop("pair", None)
    for r in rounds:
        ctx["r"] = r
        depth = 2 * r
        xm = extra_mistakes(g, ranks, r, pivot_run=full)
        for u, v in xm.pairs:
            ctx["pair"] = [u, v]
            _, trace = pair_oracle(
                g, ranks, u, v, trace_mode="full", stack_limit=depth, oracle=orc
            )
            assert trace is not None
            if trace.truncated_at != depth:
                raise _CheckFailure(
                    f"pair recursion stack never reached {depth} vertices"
                )
            validate_trace(g, ranks, trace)
            for ell in range(2, depth + 1):
                ctx["ell"] = ell
                charge(g, ranks, u, v, ell, oracle=orc, trace=trace)
            ctx.pop("ell", None)
        ctx.pop("pair", None)
        for w in xm.rpivot_state.unsettled_after():
            ctx["vertex"] = w
            _, trace = vertex_oracle(
                g, ranks, w, trace_mode="full", stack_limit=depth, oracle=orc
            )
            assert trace is not None
            if trace.truncated_at != depth:
                raise _CheckFailure(
                    f"unsettled vertex {w} has a recursion stack that stops "
                    f"before {depth}"
                )
        ctx.pop("vertex", None)


def exhaustive_small_checks(
    n_max: int = 6, rounds: tuple[int, ...] = (1, 2)
) -> list[CheckOutcome]:
    """Exact claims on every permutation of every small isomorphism class.

    One unit is a (graph, permutation) pair; all oracle, direct-query,
    stack-depth, and charging claims are checked on each, for every r in
    ``rounds``.  No sampling: a pass here is a proof for n up to ``n_max``.
    """
    if any(r < 1 for r in rounds):
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    failures: list[dict] = []
    units = 0
    for n in range(1, n_max + 1):
        for gi, g in enumerate(small_graphs(n)):
            edges = [list(e) for e in g.edges()]
            for perm in permutations(range(n)):
                units += 1
                ctx: dict = {
                    "check": "exhaustive-small-claims",
                    "n": n,
                    "graph_index": gi,
                    "edges": edges,
                    "perm": list(perm),
                }
                try:
                    _exhaustive_unit(g, perm, rounds, ctx)
                except (ClaimViolation, _CheckFailure, AssertionError) as exc:
                    ctx["detail"] = str(exc)
                    failures.append(ctx)
                    if len(failures) >= FAILURE_CAP:
                        return [
                            CheckOutcome(
                                "exhaustive-small-claims", units, tuple(failures)
                            )
                        ]
    return [CheckOutcome("exhaustive-small-claims", units, tuple(failures))]


def run_suite(
    suite: str = "all",
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    c: int = 3,
    overrides: dict[str, Callable] | None = None,
    n_max: int = 6,
    rounds: tuple[int, ...] = (1, 2),
) -> VerifyReport:
    """Run one named check suite and return its report.

    ``budget`` is trials per check.  All randomness derives from ``seed``
    through per-trial substreams, so a failure's reproducer dict pins the
    exact instance.  The "exhaustive" suite ignores budget and seed and
    instead sweeps every permutation of every graph with up to ``n_max``
    vertices; "all" bundles the three randomized suites.
    """
    if suite not in SUITE_NAMES:
        raise ValueError(f"unknown suite {suite!r}, pick from {SUITE_NAMES}")
    if budget < 1:
        raise ValueError(f"need budget >= 1, got {budget}")
    checks: list[CheckOutcome] = []
    if suite in ("invariants", "all"):
        checks.extend(invariant_checks(budget, seed, c=c))
    if suite in ("oracle", "all"):
        checks.extend(oracle_checks(budget, seed))
    if suite in ("executors", "all"):
        checks.extend(executor_checks(budget, seed, c=c, overrides=overrides))
    if suite == "exhaustive":
        checks.extend(exhaustive_small_checks(n_max=n_max, rounds=rounds))
    return VerifyReport(suite=suite, budget=budget, seed=seed, checks=tuple(checks))
