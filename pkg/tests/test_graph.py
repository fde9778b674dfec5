"""Graph container, rank draws, clusterings, and text I/O."""

from __future__ import annotations

import numpy as np
import pytest

from rpivot.graph import (
    Clustering,
    Graph,
    GraphFormatError,
    RankAssignment,
    RankKind,
    build_graph,
    clustering_cost,
    is_edge,
    is_refinement,
    make_rng,
    random_integer_ranks,
    random_permutation,
    read_edge_list,
    read_graph_text,
    same_partition,
    substream,
    write_graph_text,
)


def test_build_graph_basics():
    g = build_graph(4, [(0, 1), (2, 1), (2, 3)])
    assert g.n == 4 and g.m == 3
    assert g.adj[1] == (0, 2)
    assert g.has_edge(1, 2) and g.has_edge(2, 1)
    assert not g.has_edge(0, 3)
    assert list(g.edges()) == [(0, 1), (1, 2), (2, 3)]
    assert 0 in g.nbr_sets[1] and 3 not in g.nbr_sets[1]


def test_build_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        build_graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        build_graph(3, [(0, 3)])
    with pytest.raises(ValueError):
        build_graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        build_graph(-1, [])


def test_empty_and_edgeless_graphs():
    g = build_graph(0, [])
    assert g.n == 0 and g.m == 0 and list(g.edges()) == []
    g = build_graph(3, [])
    assert g.m == 0 and all(g.adj[v] == () for v in range(3))


def test_is_edge_bisection_matches_sets():
    rng = make_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 15))
        mask = rng.random((n, n)) < 0.4
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if mask[u, v]]
        g = build_graph(n, edges)
        for u in range(n):
            for v in range(n):
                assert is_edge(g, u, v) == (v in g.nbr_sets[u])


def test_rank_assignment_validation():
    perm = RankAssignment(RankKind.PERMUTATION, (2, 0, 1))
    assert perm.n == 3 and perm.kind is RankKind.PERMUTATION
    with pytest.raises(ValueError):
        RankAssignment(RankKind.PERMUTATION, (0, 0, 1))
    with pytest.raises(ValueError):
        RankAssignment(RankKind.PERMUTATION, (0, 1, 3))
    ints = RankAssignment(RankKind.INTEGER, (7, 0, 7), c=2)
    assert ints.c == 2
    with pytest.raises(ValueError):
        RankAssignment(RankKind.INTEGER, (9, 0, 0), c=2)  # 9 == 3**2
    with pytest.raises(ValueError):
        RankAssignment(RankKind.INTEGER, (0, 0, 0), c=0)


def test_random_draws_deterministic():
    a = random_permutation(10, 5)
    b = random_permutation(10, 5)
    assert a == b
    assert sorted(a.ranks) == list(range(10))
    x = random_integer_ranks(10, 3, 5)
    y = random_integer_ranks(10, 3, 5)
    assert x == y
    assert all(0 <= v < 1000 for v in x.ranks)
    assert x.kind is RankKind.INTEGER and x.c == 3


def test_substream_distinct_per_trial_and_reproducible():
    def draws(rng):
        return [int(rng.integers(1 << 30)) for _ in range(3)]

    streams = [draws(substream(3, t)) for t in range(4)]
    assert len({tuple(s) for s in streams}) == 4
    assert draws(substream(3, 2)) == streams[2]
    assert draws(substream(4, 2)) != streams[2]


def test_clustering_validation_and_blocks():
    c = Clustering(ids=(0, 1, 0, 2), num_clusters=3)
    assert c.n == 4
    assert c.blocks() == [[0, 2], [1], [3]]
    with pytest.raises(ValueError):
        Clustering(ids=(0, 2), num_clusters=2)  # id 1 missing
    with pytest.raises(ValueError):
        Clustering(ids=(), num_clusters=1)


def test_clustering_cost_counts_both_mistake_kinds():
    # triangle plus isolated vertex, all in one cluster: 3 edges kept,
    # 3 non-adjacent pairs co-clustered
    g = build_graph(4, [(0, 1), (0, 2), (1, 2)])
    one = Clustering(ids=(0, 0, 0, 0), num_clusters=1)
    assert clustering_cost(g, one) == 3
    split = Clustering(ids=(0, 0, 0, 1), num_clusters=2)
    assert clustering_cost(g, split) == 0
    singletons = Clustering(ids=(0, 1, 2, 3), num_clusters=4)
    assert clustering_cost(g, singletons) == 3


def test_refinement_and_partition_equality():
    fine = Clustering(ids=(0, 1, 2, 2), num_clusters=3)
    coarse = Clustering(ids=(0, 0, 1, 1), num_clusters=2)
    assert is_refinement(fine, coarse)
    assert not is_refinement(coarse, fine)
    relabeled = Clustering(ids=(1, 1, 0, 0), num_clusters=2)
    assert same_partition(coarse, relabeled)
    assert not same_partition(fine, coarse)


def test_graph_text_roundtrip(tmp_path):
    g = build_graph(5, [(0, 4), (1, 2), (0, 1)])
    path = tmp_path / "g.txt"
    write_graph_text(g, path)
    back = read_graph_text(path)
    assert back == g
    text = path.read_text()
    assert text.splitlines()[0] == "5 3"


def test_graph_text_rejects_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 1\n0 1 2\n")
    with pytest.raises(GraphFormatError):
        read_graph_text(path)
    path.write_text("3 2\n0 1\n")
    with pytest.raises(GraphFormatError):
        read_graph_text(path)
    path.write_text("x y\n")
    with pytest.raises(GraphFormatError):
        read_graph_text(path)


def test_read_edge_list_remaps_labels(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("alice bob\nbob carol\n# comment\n\ncarol alice\n")
    g, mapping = read_edge_list(path)
    assert g.n == 3 and g.m == 3
    assert mapping == {"alice": 0, "bob": 1, "carol": 2}


def test_numpy_generator_passthrough():
    rng = make_rng(9)
    assert make_rng(rng) is rng
    assert isinstance(make_rng(None), np.random.Generator)
