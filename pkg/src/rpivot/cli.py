"""Command-line driver: reproducible experiments over every library layer.

Subcommands: run, ratio, width, adversarial, verify, gen.  Every artifact
embeds its schema name, the full argument set, and the seed, so rerunning
the recorded command reproduces the file byte for byte.  CSV artifacts lead
with ``# schema=`` and ``# config=`` comment lines; JSON artifacts carry the
same fields at the top level.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import ClaimViolation
from .exact import exhaustive_permutation_stats, expected_cost_mc
from .executors import (
    lca_cluster_all,
    local_execute,
    mpc_execute,
    streaming_execute,
)
from .experiments import (
    DEFAULT_HOST_EDGE_BUDGET,
    clique_path_report,
    layered_sweep,
    ratio_study,
)
from .generators import (
    clique_plus_path,
    cycle_graph,
    disjoint_cliques,
    erdos_renyi,
    layered_line_graph,
    path_graph,
    petersen_graph,
)
from .graph import (
    Graph,
    GraphFormatError,
    clustering_cost,
    make_rng,
    random_integer_ranks,
    random_permutation,
    read_graph_text,
    substream,
    write_graph_text,
)
from .oracle import width_study
from .pivot import r_pivot_variant, run_report
from .verify import DEFAULT_BUDGET, SUITE_NAMES, run_suite

__all__ = [
    "ExperimentConfig",
    "rounds_for_epsilon",
    "build_parser",
    "main",
]

ALGOS = (
    "pivot",
    "parallel",
    "rpivot",
    "rpivot-variant",
    "streaming",
    "local",
    "mpc",
    "lca",
)
_PERMUTATION_ALGOS = ("pivot", "parallel", "rpivot", "streaming")

GEN_SPECS = (
    "path:N | cycle:N | er:N,P | cliques:S1,S2,... | petersen | "
    "clique_path:N,R | layered:R,N"
)


def rounds_for_epsilon(epsilon: float) -> int:
    """Smallest round count whose extra-cost factor 8/(2r-1) is <= epsilon."""
    if epsilon <= 0:
        raise ValueError(f"need epsilon > 0, got {epsilon}")
    r = max(1, math.ceil((8.0 / epsilon + 1.0) / 2.0))
    assert 8.0 / (2 * r - 1) <= epsilon
    return r


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one invocation depends on; embedded in each artifact."""

    command: str
    gen: str | None = None
    file: str | None = None
    algo: str | None = None
    r: int | None = None
    epsilon: float | None = None
    c: int = 3
    delta: float = 0.5
    trials: int | str = 1
    seed: int = 0
    threads: int = 1
    out: str | None = None
    format: str = "json"
    plot: bool = False
    opt: int | None = None
    kind: str | None = None
    sizes: str | None = None
    edge_budget: int = DEFAULT_HOST_EDGE_BUDGET
    suite: str | None = None
    budget: int | None = None
    n_max: int | None = None

    def resolved_r(self, default: int = 1) -> int:
        if self.epsilon is not None:
            if self.r is not None:
                raise ValueError("pass either --r or --epsilon, not both")
            return rounds_for_epsilon(self.epsilon)
        return self.r if self.r is not None else default


def _parse_trials(text: str) -> int | str:
    if text == "exhaustive":
        return text
    try:
        value = int(text)
    except ValueError:
        raise ValueError(
            f"--trials takes an integer or 'exhaustive', got {text!r}"
        ) from None
    if value < 1:
        raise ValueError(f"need at least 1 trial, got {value}")
    return value


def _config_from_args(args: argparse.Namespace, command: str) -> ExperimentConfig:
    fields = ExperimentConfig.__dataclass_fields__
    kwargs = {
        name: getattr(args, name)
        for name in fields
        if name != "command" and hasattr(args, name)
    }
    if isinstance(kwargs.get("trials"), str):
        kwargs["trials"] = _parse_trials(kwargs["trials"])
    return ExperimentConfig(command=command, **kwargs)


def _parse_number_list(text: str, what: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValueError(f"{what} wants comma-separated integers, got {text!r}")
    if not values:
        raise ValueError(f"{what} is empty")
    return values


def resolve_graph(config: ExperimentConfig) -> tuple[Graph, dict]:
    """Build or load the input graph; returns it with a source description.

    Generator randomness (er) comes from the top-level seed stream, disjoint
    from the per-trial substreams.  Adversarial generators contribute only
    their graph here; their fixed ranks belong to the adversarial command.
    """
    if (config.gen is None) == (config.file is None):
        raise ValueError("pass exactly one of --gen or --file")
    if config.file is not None:
        g = read_graph_text(config.file)
        return g, {"file": config.file, "n": g.n, "m": g.m}
    spec = config.gen
    name, _, argtext = spec.partition(":")
    desc: dict = {"gen": spec}
    if name == "path":
        g = path_graph(int(argtext))
    elif name == "cycle":
        g = cycle_graph(int(argtext))
    elif name == "petersen":
        if argtext:
            raise ValueError("petersen takes no parameters")
        g = petersen_graph()
    elif name == "er":
        parts = argtext.split(",")
        if len(parts) != 2:
            raise ValueError(f"er wants er:N,P, got {spec!r}")
        g = erdos_renyi(int(parts[0]), float(parts[1]), make_rng(config.seed))
    elif name == "cliques":
        g = disjoint_cliques(_parse_number_list(argtext, "cliques"))
    elif name == "clique_path":
        parts = _parse_number_list(argtext, "clique_path")
        if len(parts) != 2:
            raise ValueError(f"clique_path wants clique_path:N,R, got {spec!r}")
        g = clique_plus_path(parts[0], parts[1]).graph
    elif name == "layered":
        parts = _parse_number_list(argtext, "layered")
        if len(parts) != 2:
            raise ValueError(f"layered wants layered:R,N, got {spec!r}")
        g = layered_line_graph(parts[0], parts[1]).graph
    else:
        raise ValueError(f"unknown generator {name!r}; formats: {GEN_SPECS}")
    desc.update(n=g.n, m=g.m)
    return g, desc


# ---------------------------------------------------------------------------
# artifact output


def _emit(
    config: ExperimentConfig,
    schema: str,
    results: dict,
    rows: list[dict],
) -> None:
    """Write the artifact per --format, to --out or stdout.

    The embedded config drops the output path so reruns into different
    destinations produce byte-identical artifacts.
    """
    cfg = asdict(config)
    cfg.pop("out", None)
    if config.format == "json":
        payload = {
            "schema": schema,
            "config": cfg,
            "seed": config.seed,
            "results": results,
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [
            f"# schema={schema}",
            f"# config={json.dumps(cfg)}",
        ]
        if rows:
            fieldnames = list(rows[0].keys())
            buf = io.StringIO()
            writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
            lines.append(buf.getvalue().rstrip("\n"))
        text = "\n".join(lines) + "\n"
    if config.out is None:
        sys.stdout.write(text)
    else:
        Path(config.out).write_text(text)


def _figure_path(config: ExperimentConfig) -> Path:
    if config.out is None:
        raise ValueError("--plot needs --out to know where figures go")
    return Path(config.out).with_suffix(".png")


# ---------------------------------------------------------------------------
# run


def _run_exhaustive(config: ExperimentConfig, g: Graph) -> dict:
    if config.algo not in ("pivot", "parallel", "rpivot"):
        raise ValueError(
            "exhaustive trials enumerate rank permutations; "
            f"{config.algo} draws independent integer ranks, so sample instead"
        )
    r = config.resolved_r()
    stats = exhaustive_permutation_stats(g, r)
    if config.algo == "rpivot":
        mean = stats.sum_cost_rpivot / stats.permutations
    else:
        mean = stats.sum_cost_pivot / stats.permutations
    return {
        "algo": config.algo,
        "n": g.n,
        "m": g.m,
        "r": r,
        "trials": stats.permutations,
        "exhaustive": True,
        "mean_cost": mean,
        "se_cost": 0.0,
    }


def _run_sampled(config: ExperimentConfig, g: Graph) -> dict:
    r = config.resolved_r()
    trials = config.trials
    algo = config.algo
    out: dict = {
        "algo": algo,
        "n": g.n,
        "m": g.m,
        "r": r,
        "trials": trials,
        "exhaustive": False,
    }
    if algo in ("pivot", "parallel", "rpivot"):
        stats = expected_cost_mc(
            g, r, trials, config.seed, threads=config.threads
        ) if trials >= 2 else None
        if stats is None:
            rng = substream(config.seed, 0)
            ranks = random_permutation(g.n, rng)
            rep = run_report(g, ranks, r)
            cost = rep["cost"] if algo == "rpivot" else rep["full_cost"]
            out.update(mean_cost=float(cost), se_cost=0.0, detail=rep)
            return out
        if algo == "rpivot":
            out.update(
                mean_cost=stats.mean_cost_rpivot, se_cost=stats.se_cost_rpivot
            )
        else:
            out.update(
                mean_cost=stats.mean_cost_pivot, se_cost=stats.se_cost_pivot
            )
        return out

    total = 0.0
    total_sq = 0.0
    resources: dict[str, int] = {}

    def bump(key: str, value: int) -> None:
        resources[key] = max(resources.get(key, 0), value)

    edges = list(g.edges())
    for t in range(trials):
        rng = substream(config.seed, t)
        if algo == "streaming":
            ranks = random_permutation(g.n, rng)
            state, rep = streaming_execute(edges, g.n, ranks, r)
            bump("max_passes", rep.passes)
            bump("max_peak_words", rep.peak_words)
        else:
            ranks = random_integer_ranks(g.n, config.c, rng)
            if algo == "rpivot-variant":
                state = r_pivot_variant(g, ranks, r)
            elif algo == "local":
                state, rep = local_execute(g, ranks, r)
                bump("max_rounds", rep.rounds)
                bump("max_message_bits", rep.max_message_bits)
            elif algo == "mpc":
                state, rep = mpc_execute(g, ranks, r, config.delta)
                bump("max_peak_machine_words", rep.peak_machine_words)
                bump("capacity", rep.capacity)
                bump("max_booked_rounds", rep.booked_rounds)
            else:
                state, answers = lca_cluster_all(g, ranks, r)
                bump("max_probes", max(a.probes for a in answers))
        cost = clustering_cost(g, state.clustering)
        total += cost
        total_sq += cost * cost
    mean = total / trials
    if trials > 1:
        var = max(total_sq / trials - mean * mean, 0.0) * trials / (trials - 1)
        se = math.sqrt(var / trials)
    else:
        se = 0.0
    out.update(mean_cost=mean, se_cost=se)
    out.update(resources)
    if algo in ("local", "mpc", "lca", "rpivot-variant"):
        out["c"] = config.c
    if algo == "mpc":
        out["delta"] = config.delta
    return out


def cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args, "run")
    if config.algo not in ALGOS:
        raise ValueError(f"unknown algo {config.algo!r}, pick from {ALGOS}")
    if config.plot:
        raise ValueError("plotting applies to ratio, width, and adversarial")
    g, source = resolve_graph(config)
    if config.trials == "exhaustive":
        results = _run_exhaustive(config, g)
    else:
        results = _run_sampled(config, g)
    results["source"] = source
    row = {k: v for k, v in results.items() if not isinstance(v, dict)}
    _emit(config, "rpivot/run-v1", results, [row])
    return 0


# ---------------------------------------------------------------------------
# ratio


def cmd_ratio(args: argparse.Namespace) -> int:
    config = _config_from_args(args, "ratio")
    g, source = resolve_graph(config)
    r = config.resolved_r()
    report = ratio_study(
        g,
        r,
        trials=config.trials,
        seed=config.seed,
        opt=config.opt,
        threads=config.threads,
    )
    results = asdict(report)
    results["source"] = source
    row = {k: v for k, v in results.items() if not isinstance(v, dict)}
    _emit(config, "rpivot/ratio-v1", results, [row])
    if config.plot:
        from .plots import plot_ratio

        path = plot_ratio(report, _figure_path(config))
        print(f"figure written to {path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# width


def cmd_width(args: argparse.Namespace) -> int:
    config = _config_from_args(args, "width")
    if config.trials == "exhaustive":
        raise ValueError("width sampling draws one depth per trial; use --trials N")
    g, source = resolve_graph(config)
    r = config.resolved_r()
    result = width_study(
        g, r, config.trials, config.seed, threads=config.threads
    )
    rows = result.rows()
    edge_paths = [
        max(row["mean_paths_ab"], row["mean_paths_ba"])
        for row in rows
        if row["is_edge"]
    ]
    non_paths = [
        max(row["mean_paths_ab"], row["mean_paths_ba"])
        for row in rows
        if not row["is_edge"]
    ]
    summary = {
        "n": result.n,
        "r": result.r,
        "trials": result.trials,
        "width_bound": 8 / (2 * r - 1),
        "max_mean_charges": result.max_mean_charges(),
        "max_edge_paths": max(edge_paths, default=0.0),
        "max_nonedge_paths": max(non_paths, default=0.0),
        "source": source,
    }
    _emit(config, "rpivot/width-v1", {"summary": summary, "pairs": rows}, rows)
    if config.plot:
        from .plots import plot_width

        path = plot_width(result, _figure_path(config))
        print(f"figure written to {path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# adversarial


def cmd_adversarial(args: argparse.Namespace) -> int:
    config = _config_from_args(args, "adversarial")
    if config.trials == "exhaustive":
        raise ValueError("adversarial studies are sampled; use --trials N")
    if config.kind == "layered":
        r = config.resolved_r()
        sizes = (
            tuple(_parse_number_list(config.sizes, "--sizes"))
            if config.sizes
            else None
        )
        sweep = layered_sweep(
            r,
            config.trials if isinstance(config.trials, int) else 10_000,
            config.seed,
            sizes=sizes,
            host_edge_budget=config.edge_budget,
            threads=config.threads,
        )
        rows = [
            {
                "n_requested": p.n_requested,
                "n_used": p.n_used,
                "alpha": p.alpha,
                "point_seed": p.seed,
                "host_vertices": p.stats.host_vertices,
                "host_edges": p.stats.host_edges,
                "trials": p.stats.trials,
                "mean_pivots_truncated": p.stats.mean_pivots_truncated,
                "mean_pivots_full": p.stats.mean_pivots_full,
                "mean_ratio": p.stats.mean_ratio,
                "se_ratio": p.stats.se_ratio,
            }
            for p in sweep.points
        ]
        results = {
            "kind": "layered",
            "r": sweep.r,
            "ratios": sweep.ratios(),
            "decreasing": sweep.is_decreasing(),
            "endpoint_separation_sigmas": sweep.endpoint_separation_sigmas(),
            "points": rows,
        }
        _emit(config, "rpivot/adversarial-v1", results, rows)
        if config.plot:
            from .plots import plot_sweep

            path = plot_sweep(sweep, _figure_path(config))
            print(f"figure written to {path}", file=sys.stderr)
        return 0

    # clique-path: deterministic, one report per requested clique size
    r = config.resolved_r(default=3)
    sizes = _parse_number_list(config.sizes or "8,40", "--sizes")
    reports = [clique_path_report(size, r) for size in sizes]
    rows = [asdict(rep) for rep in reports]
    for row in rows:
        row["pivots"] = " ".join(str(p) for p in row["pivots"])
    results = {"kind": "clique-path", "r": r, "reports": rows}
    _emit(config, "rpivot/adversarial-v1", results, rows)
    if config.plot:
        from .plots import plot_clique_path

        path = plot_clique_path(reports, _figure_path(config))
        print(f"figure written to {path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args: argparse.Namespace) -> int:
    config = _config_from_args(args, "verify")
    budget = config.budget if config.budget is not None else DEFAULT_BUDGET
    n_max = config.n_max if config.n_max is not None else 6
    report = run_suite(
        suite=config.suite or "all",
        budget=budget,
        seed=config.seed,
        c=config.c,
        n_max=n_max,
    )
    for line in report.summary_lines():
        print(line)
    rows = [
        {
            "name": c.name,
            "trials": c.trials,
            "ok": c.ok,
            "failures": len(c.failures),
        }
        for c in report.checks
    ]
    if config.out is not None or config.format == "csv":
        _emit(config, "rpivot/verify-v1", report.to_json(), rows)
    if not report.passed:
        first = next(c for c in report.checks if not c.ok)
        print(
            "reproducer: " + json.dumps(first.failures[0]),
            file=sys.stderr,
        )
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args: argparse.Namespace) -> int:
    config = _config_from_args(args, "gen")
    g, source = resolve_graph(config)
    if config.out is None:
        n = g.n
        lines = [f"{n} {g.m}"] + [f"{u} {v}" for u, v in g.edges()]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        write_graph_text(g, config.out)
        print(f"wrote {source.get('n')} vertices, {source.get('m')} edges "
              f"to {config.out}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument(
        "--trials",
        default="1",
        help="trial count, or 'exhaustive' for all permutations (small n)",
    )
    common.add_argument(
        "--threads", type=int, default=1, help="worker processes for sampling"
    )
    common.add_argument("--out", default=None, help="artifact path (default stdout)")
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="artifact format"
    )

    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--gen", default=None, help=f"generator spec: {GEN_SPECS}")
    src.add_argument("--file", default=None, help="graph text file to load")

    rounds = argparse.ArgumentParser(add_help=False)
    rounds.add_argument("--r", type=int, default=None, help="truncated round count")
    rounds.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help=(
            "extra-cost target; picks the smallest r with 8/(2r-1) <= epsilon, "
            "so the expected cost stays within (3+epsilon) of optimal"
        ),
    )

    parser = argparse.ArgumentParser(
        prog="rpivot",
        description=(
            "Truncated pivot clustering: run algorithms and executors, "
            "measure bounds, build adversarial families, self-verify."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser(
        "run",
        parents=[common, src, rounds],
        help="execute one algorithm or executor and report costs",
    )
    p_run.add_argument("--algo", default="rpivot", help=f"one of {ALGOS}")
    p_run.add_argument("--c", type=int, default=3, help="integer-rank exponent")
    p_run.add_argument(
        "--delta", type=float, default=0.5, help="memory exponent for mpc"
    )
    p_run.add_argument(
        "--plot", action="store_true", help="rejected here; see ratio/width"
    )
    p_run.set_defaults(func=cmd_run)

    p_ratio = sub.add_parser(
        "ratio",
        parents=[common, src, rounds],
        help="expected cost and extra mistakes against the optimum",
    )
    p_ratio.add_argument(
        "--opt", type=int, default=None, help="known optimal cost, skips brute force"
    )
    p_ratio.add_argument(
        "--plot", action="store_true", help="also render a figure next to --out"
    )
    p_ratio.set_defaults(func=cmd_ratio, trials="10000")

    p_width = sub.add_parser(
        "width",
        parents=[common, src, rounds],
        help="per-pair charging width and directed path counts",
    )
    p_width.add_argument(
        "--plot", action="store_true", help="also render a figure next to --out"
    )
    p_width.set_defaults(func=cmd_width, trials="10000")

    p_adv = sub.add_parser(
        "adversarial",
        parents=[common, rounds],
        help="build and measure the two adversarial families",
    )
    p_adv.add_argument(
        "kind",
        choices=("layered", "clique-path"),
        help="layered: pivot-survival sweep; clique-path: deterministic ratio",
    )
    p_adv.add_argument(
        "--sizes",
        default=None,
        help="comma-separated sizes (layered: last-layer sizes; "
        "clique-path: clique sizes, default 8,40)",
    )
    p_adv.add_argument(
        "--edge-budget",
        dest="edge_budget",
        type=int,
        default=DEFAULT_HOST_EDGE_BUDGET,
        help="host edge cap for the layered sweep",
    )
    p_adv.add_argument(
        "--plot", action="store_true", help="also render a figure next to --out"
    )
    p_adv.set_defaults(func=cmd_adversarial, trials="2000")

    p_verify = sub.add_parser(
        "verify",
        parents=[common],
        help="self-check suites; exit 0 iff every check passes",
    )
    p_verify.add_argument(
        "--suite", choices=SUITE_NAMES, default="all", help="which checks to run"
    )
    p_verify.add_argument(
        "--budget", type=int, default=None, help="trials per check"
    )
    p_verify.add_argument("--c", type=int, default=3, help="integer-rank exponent")
    p_verify.add_argument(
        "--n-max",
        dest="n_max",
        type=int,
        default=None,
        help="largest n for the exhaustive suite (default 6)",
    )
    p_verify.set_defaults(func=cmd_verify)

    p_gen = sub.add_parser(
        "gen",
        parents=[common, src],
        help="materialize a generator as a graph text file",
    )
    p_gen.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, GraphFormatError, ClaimViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
