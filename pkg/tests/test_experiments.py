"""Adversarial-family studies and the ratio measurements behind them."""

from __future__ import annotations

import numpy as np
import pytest

from rpivot.experiments import (
    clique_path_report,
    host_matching_counts,
    host_matching_study,
    layered_sweep,
    ratio_study,
    sweep_sizes,
)
from rpivot.generators import (
    clique_plus_path,
    cycle_graph,
    disjoint_cliques,
    layered_host,
    layered_line_graph,
    petersen_graph,
)
from rpivot.graph import RankAssignment, RankKind, substream
from rpivot.pivot import parallel_pivot_full, r_pivot


def test_host_matching_equals_line_graph_run():
    # rounds of edge-local-minimum matching on the host are exactly pivot
    # rounds on its line graph; compare counts trial by trial
    host = layered_host(1, 256).graph
    line = layered_line_graph(1, 256).graph
    assert line.n == host.m
    for t in range(6):
        # order lists host edges by ascending rank, so edge order[k] gets
        # line-graph rank k
        order = substream(4, t).permutation(host.m)
        rank_of = np.empty(host.m, dtype=int)
        rank_of[order] = np.arange(host.m)
        ranks = RankAssignment(
            RankKind.PERMUTATION, tuple(int(x) for x in rank_of)
        )
        at_r, total, rounds_full = host_matching_counts(host, order, 1)
        state = r_pivot(line, ranks, 1)
        full = parallel_pivot_full(line, ranks)
        assert at_r == len(state.pivots)
        assert total == len(full.pivots)
        assert rounds_full == full.rounds_used


def test_host_matching_counts_rejects_bad_order():
    host = layered_host(1, 256).graph
    with pytest.raises(ValueError):
        host_matching_counts(host, np.zeros(host.m, dtype=int), 1)
    with pytest.raises(ValueError):
        host_matching_counts(host, np.arange(host.m), 0)


def test_host_matching_study_deterministic_and_thread_free():
    host = layered_host(1, 256).graph
    a = host_matching_study(host, 1, trials=40, seed=2)
    b = host_matching_study(host, 1, trials=40, seed=2)
    c = host_matching_study(host, 1, trials=40, seed=2, threads=3)
    assert a == b == c
    assert 0 < a.mean_ratio < 1
    assert a.mean_pivots_truncated <= a.mean_pivots_full


def test_sweep_sizes_r1_default_budget():
    assert sweep_sizes(1) == (256, 6561)
    with pytest.raises(ValueError):
        sweep_sizes(1, host_edge_budget=100)


def test_layered_sweep_points_and_separation():
    res = layered_sweep(1, trials=150, seed=5)
    assert [p.alpha for p in res.points] == [2, 3]
    assert [p.n_used for p in res.points] == [256, 6588]
    assert res.is_decreasing()
    assert res.endpoint_separation_sigmas() > 3.0
    # per-point seeds differ so any point can be replayed alone
    assert len({p.seed for p in res.points}) == len(res.points)


def test_layered_sweep_needs_two_trials():
    with pytest.raises(ValueError):
        layered_sweep(1, trials=1, seed=0)


def test_clique_path_report_frozen_small():
    rep = clique_path_report(8, 3)
    assert (rep.n, rep.m) == (14, 34)
    assert rep.cost == 31  # 28 clique pairs + 3 path edges cut
    assert rep.witness_cost == 3
    assert rep.pivots == (0, 2, 4)
    assert rep.clique_all_singletons
    assert rep.cost >= 28
    assert rep.ratio == rep.cost / rep.witness_cost
    assert rep.reference_ratio == pytest.approx(8 * 7 / (2 * (2 * 3 + 1)))


def test_clique_path_cost_formula():
    # cost is exactly C(N,2) + r: every clique pair plus one cut path edge
    # per round
    for clique_n, r in ((5, 1), (6, 2), (9, 3)):
        rep = clique_path_report(clique_n, r)
        assert rep.cost == clique_n * (clique_n - 1) // 2 + r
        assert rep.witness_cost == r
        assert rep.pivots == tuple(range(0, 2 * r, 2))


def test_clique_path_witness_is_feasible():
    from rpivot.graph import clustering_cost
    from rpivot.experiments import _clique_path_witness

    inst = clique_plus_path(7, 2)
    w = _clique_path_witness(7, 2, inst.graph.n)
    assert clustering_cost(inst.graph, w) == 2


def test_clique_path_ratio_grows_with_clique_size():
    small = clique_path_report(8, 3)
    large = clique_path_report(40, 3)
    assert large.ratio > 10 * small.ratio


def test_ratio_study_exhaustive_c5_frozen():
    rep = ratio_study(cycle_graph(5), 1, trials="exhaustive")
    assert rep.exhaustive and rep.trials == 120
    assert rep.opt == 3 and rep.opt_source == "brute-force"
    assert rep.mean_cost_rpivot == pytest.approx(400 / 120)
    assert rep.mean_cost_pivot == pytest.approx(3.0)
    assert rep.mean_x == pytest.approx(40 / 120)
    assert rep.se_x == 0.0
    assert rep.ratio_cost == pytest.approx((400 / 120) / 3)
    assert rep.ratio_x == pytest.approx((40 / 120) / 3)
    assert rep.cost_bound_factor == pytest.approx(11.0)
    assert rep.x_bound_factor == pytest.approx(8.0)
    assert rep.ratio_cost <= rep.cost_bound_factor
    assert rep.ratio_x <= rep.x_bound_factor


def test_ratio_study_zero_opt_reports_none_ratios():
    rep = ratio_study(disjoint_cliques([3, 4]), 1, trials=50, seed=1)
    assert rep.opt == 0
    assert rep.ratio_cost is None and rep.ratio_x is None
    assert rep.mean_cost_rpivot == 0.0 and rep.mean_x == 0.0


def test_ratio_study_sampled_petersen():
    rep = ratio_study(petersen_graph(), 2, trials=400, seed=9)
    assert not rep.exhaustive
    assert rep.opt == 10
    assert rep.cost_bound_factor == pytest.approx(3 + 8 / 3)
    assert rep.x_bound_factor == pytest.approx(8 / 3)
    assert rep.ratio_cost is not None and rep.ratio_cost < rep.cost_bound_factor
    again = ratio_study(petersen_graph(), 2, trials=400, seed=9)
    assert rep == again


def test_ratio_study_accepts_supplied_opt():
    rep = ratio_study(cycle_graph(5), 1, trials=30, seed=0, opt=3)
    assert rep.opt == 3 and rep.opt_source == "given"
    with pytest.raises(ValueError):
        ratio_study(cycle_graph(5), 1, trials=30, seed=0, opt=-1)
