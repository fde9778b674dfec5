"""Figure rendering for study results.

Everything here draws to files through the Agg backend, so it works without
a display.  The CLI only calls these when asked to; the delimited outputs
stay the primary artifact.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .experiments import CliquePathReport, LayeredSweepResult, RatioReport
from .oracle import WidthStudyResult

__all__ = [
    "plot_width",
    "plot_sweep",
    "plot_ratio",
    "plot_clique_path",
]


def _finish(fig, path: str | Path) -> Path:
    out = Path(path)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_width(result: WidthStudyResult, path: str | Path) -> Path:
    """Per-pair charge means and directed path counts with their bounds.

    Left panel: every pair's mean charge count, split into edges and
    non-edges, against the shared width bound.  Right panel: the directed
    per-pair path counts against their 4 (edges) and 2 (non-edges) bounds.
    """
    rows = result.rows()
    if not rows:
        raise ValueError("width result has no pairs to plot")
    bound = 8 / (2 * result.r - 1)
    edge_rows = [row for row in rows if row["is_edge"]]
    non_rows = [row for row in rows if not row["is_edge"]]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for rws, color, label in (
        (edge_rows, "tab:blue", "edges"),
        (non_rows, "tab:orange", "non-edges"),
    ):
        if not rws:
            continue
        ys = sorted(row["mean_charges"] for row in rws)
        ax1.plot(range(len(ys)), ys, ".", color=color, label=label, markersize=4)
    ax1.axhline(bound, color="tab:red", linestyle="--", label=f"bound {bound:g}")
    ax1.set_xlabel("pair (sorted)")
    ax1.set_ylabel("mean charges per trial")
    ax1.set_title(f"charging width, n={result.n}, r={result.r}")
    ax1.legend(fontsize=8)

    for rws, color, label, cap in (
        (edge_rows, "tab:blue", "edges", 4.0),
        (non_rows, "tab:orange", "non-edges", 2.0),
    ):
        if not rws:
            continue
        ys = sorted(
            max(row["mean_paths_ab"], row["mean_paths_ba"]) for row in rws
        )
        ax2.plot(range(len(ys)), ys, ".", color=color, label=label, markersize=4)
        ax2.axhline(cap, color=color, linestyle="--", linewidth=1)
    ax2.set_xlabel("pair (sorted)")
    ax2.set_ylabel("max directed path count")
    ax2.set_title("directed path counts vs 4 / 2")
    ax2.legend(fontsize=8)
    return _finish(fig, path)


def plot_sweep(result: LayeredSweepResult, path: str | Path) -> Path:
    """Truncated/full pivot-count ratio against instance size."""
    if not result.points:
        raise ValueError("sweep result has no points to plot")
    xs = [p.n_used for p in result.points]
    ys = [p.stats.mean_ratio for p in result.points]
    es = [3 * p.stats.se_ratio for p in result.points]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(xs, ys, yerr=es, fmt="o-", capsize=4)
    for p in result.points:
        ax.annotate(
            f"alpha={p.alpha}",
            (p.n_used, p.stats.mean_ratio),
            textcoords="offset points",
            xytext=(6, 6),
            fontsize=8,
        )
    ax.set_xscale("log")
    ax.set_xlabel("layered instance size")
    ax.set_ylabel("E[truncated pivots] / E[full pivots]")
    ax.set_title(f"pivot survival under {result.r} rounds (3 SE bars)")
    return _finish(fig, path)


def plot_ratio(report: RatioReport, path: str | Path) -> Path:
    """Cost and extra-mistake ratios against their factors over opt."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if report.ratio_cost is None or report.ratio_x is None:
        # Zero optimum: show the raw means, which should sit at zero.
        labels = ["mean cost", "mean extra mistakes"]
        values = [report.mean_cost_rpivot, report.mean_x]
        errs = [3 * report.se_cost_rpivot, 3 * report.se_x]
        ax.bar(labels, values, yerr=errs, capsize=4, color="tab:blue")
        ax.set_ylabel("count")
        ax.set_title(f"n={report.n}, r={report.r}, opt=0")
        return _finish(fig, path)
    labels = ["cost / opt", "extra mistakes / opt"]
    values = [report.ratio_cost, report.ratio_x]
    errs = [
        3 * report.se_cost_rpivot / report.opt,
        3 * report.se_x / report.opt,
    ]
    bounds = [report.cost_bound_factor, report.x_bound_factor]
    xs = range(len(labels))
    ax.bar(xs, values, yerr=errs, capsize=4, color="tab:blue", label="measured")
    ax.plot(xs, bounds, "r_", markersize=40, label="bound")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_ylabel("ratio")
    ax.set_title(f"n={report.n}, r={report.r}, opt={report.opt} (3 SE bars)")
    ax.legend(fontsize=8)
    return _finish(fig, path)


def plot_clique_path(
    reports: list[CliquePathReport] | tuple[CliquePathReport, ...],
    path: str | Path,
) -> Path:
    """Cost, witness cost, and ratio growth across clique sizes."""
    if not reports:
        raise ValueError("need at least one report to plot")
    reports = sorted(reports, key=lambda rep: rep.n)
    xs = [rep.n for rep in reports]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(xs, [rep.cost for rep in reports], "o-", label="truncated cost")
    ax1.plot(
        xs, [rep.witness_cost for rep in reports], "s-", label="witness cost"
    )
    ax1.set_yscale("log")
    ax1.set_xlabel("instance size")
    ax1.set_ylabel("disagreements")
    ax1.set_title(f"clique plus path, r={reports[0].r}")
    ax1.legend(fontsize=8)

    ax2.plot(xs, [rep.ratio for rep in reports], "o-", label="cost / witness")
    ax2.plot(
        xs,
        [rep.reference_ratio for rep in reports],
        "--",
        label="N(N-1) / (2(2r+1))",
    )
    ax2.set_yscale("log")
    ax2.set_xlabel("instance size")
    ax2.set_ylabel("ratio")
    ax2.set_title("lower-bound growth")
    ax2.legend(fontsize=8)
    return _finish(fig, path)
