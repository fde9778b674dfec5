"""Instance families: fixed graphs, random graphs, adversarial builds."""

from __future__ import annotations

import pytest

from rpivot.generators import (
    clique_plus_path,
    disjoint_cliques,
    erdos_renyi,
    layered_dimensions,
    layered_host,
    layered_line_graph,
    line_graph_size,
    path_graph,
    cycle_graph,
    petersen_graph,
    small_graphs,
)
from rpivot.graph import build_graph, is_edge


def test_path_and_cycle():
    p = path_graph(5)
    assert p.n == 5 and p.m == 4
    assert p.has_edge(0, 1) and not p.has_edge(0, 4)
    c = cycle_graph(5)
    assert c.n == 5 and c.m == 5 and c.has_edge(0, 4)
    with pytest.raises(ValueError):
        cycle_graph(2)


def test_petersen_shape():
    g = petersen_graph()
    assert g.n == 10 and g.m == 15
    assert all(len(g.adj[v]) == 3 for v in range(10))
    # girth 5: no triangles, no 4-cycles
    for u in range(10):
        for v in g.adj[u]:
            assert not (set(g.adj[u]) & set(g.adj[v]))
    for u in range(10):
        for v in range(u + 1, 10):
            if not g.has_edge(u, v):
                assert len(set(g.adj[u]) & set(g.adj[v])) <= 1


def test_erdos_renyi_edges_and_determinism():
    g = erdos_renyi(30, 0.5, 11)
    h = erdos_renyi(30, 0.5, 11)
    assert g == h
    assert g != erdos_renyi(30, 0.5, 12)
    assert erdos_renyi(30, 0.0, 1).m == 0
    assert erdos_renyi(30, 1.0, 1).m == 30 * 29 // 2
    with pytest.raises(ValueError):
        erdos_renyi(5, 1.5, 1)


def test_disjoint_cliques():
    g = disjoint_cliques([3, 2, 1])
    assert g.n == 6 and g.m == 4
    assert g.has_edge(0, 2) and g.has_edge(3, 4)
    assert not g.has_edge(2, 3) and g.adj[5] == ()


def test_small_graphs_isomorphism_class_counts():
    assert [len(small_graphs(n)) for n in range(1, 7)] == [1, 2, 4, 11, 34, 156]
    with pytest.raises(ValueError):
        small_graphs(7)
    with pytest.raises(ValueError):
        small_graphs(0)


def test_small_graphs_distinct_degree_multisets_where_possible():
    # classes are pairwise non-isomorphic: weaker sanity check via
    # (n, m, sorted degree sequence, triangle count) fingerprints
    seen = set()
    for g in small_graphs(5):
        degs = tuple(sorted(len(g.adj[v]) for v in range(g.n)))
        tri = sum(
            1
            for a in range(g.n)
            for b in range(a + 1, g.n)
            for c in range(b + 1, g.n)
            if g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)
        )
        seen.add((g.m, degs, tri))
    # fingerprint collisions exist among the 34 classes but most separate
    assert len(seen) >= 30


def test_clique_plus_path_layout():
    inst = clique_plus_path(5, 2)
    g = inst.graph
    assert g.n == 9 and inst.ranks is not None
    assert inst.ranks.ranks == tuple(range(9))
    # path 0-1-2-3, attachment 3-4, clique on 4..8
    for i in range(4):
        assert g.has_edge(i, i + 1)
    assert len(g.adj[0]) == 1
    for a in range(4, 9):
        for b in range(a + 1, 9):
            assert g.has_edge(a, b)
    assert not g.has_edge(0, 2) and not g.has_edge(2, 4)
    assert g.m == 4 + 10
    with pytest.raises(ValueError):
        clique_plus_path(1, 1)


def test_layered_dimensions_small_request():
    d = layered_dimensions(1, 256)
    assert (d.t, d.alpha, d.n_used) == (4, 2, 256)
    assert d.layer_sizes == (32, 64, 128, 256)
    assert d.host_vertices == 480
    assert d.host_edges == 3712


def test_layered_dimensions_alpha3_rounds_to_even():
    d = layered_dimensions(1, 6561)
    assert d.alpha == 3
    # 3**8 = 6561 is odd, bumped by one step of alpha**(t-1) = 27
    assert d.n_used == 6588
    assert d.layer_sizes == (244, 732, 2196, 6588)
    assert d.host_edges == 260226


def test_layered_dimensions_rounds_small_requests_up():
    d = layered_dimensions(1, 10)
    assert d.alpha == 2 and d.n_used == 256


def test_layered_host_biregular():
    host = layered_host(1, 256)
    g = host.graph
    assert g.n == 480 and g.m == 3712
    t = host.t
    # right/left degrees per layer, plus one matching edge inside layer t
    for i in range(t - 1):
        off, size = host.layer_offsets[i], host.layer_sizes[i]
        nxt_off = host.layer_offsets[i + 1]
        nxt_end = nxt_off + host.layer_sizes[i + 1]
        for v in range(off, off + size):
            right = [w for w in g.adj[v] if nxt_off <= w < nxt_end]
            assert len(right) == host.right_degrees[i]
    for i in range(1, t):
        off, size = host.layer_offsets[i], host.layer_sizes[i]
        prv_off = host.layer_offsets[i - 1]
        for v in range(off, off + size):
            left = [w for w in g.adj[v] if prv_off <= w < off]
            assert len(left) == host.left_degrees[i - 1]
    top_off = host.layer_offsets[-1]
    inside = [
        (u, v) for u, v in g.edges() if u >= top_off and v >= top_off
    ]
    assert len(inside) == host.layer_sizes[-1] // 2
    assert all(v == u + 1 for u, v in inside)


def test_line_graph_adjacency_means_shared_endpoint():
    host = layered_host(1, 256)
    inst = layered_line_graph(1, 256)
    g = inst.graph
    n_line, m_line = line_graph_size(host.graph)
    assert (g.n, g.m) == (n_line, m_line)
    host_edges = list(host.graph.edges())
    assert g.n == len(host_edges)
    # spot check a slice of pairs against the defining property
    for i in range(0, g.n, 97):
        for j in range(i + 1, min(i + 40, g.n)):
            share = bool(set(host_edges[i]) & set(host_edges[j]))
            assert is_edge(g, i, j) == share


def test_line_graph_edge_budget_enforced():
    with pytest.raises(ValueError):
        layered_line_graph(1, 256, edge_budget=100)


def test_line_graph_metadata_records_shape():
    inst = layered_line_graph(1, 256)
    meta = inst.metadata
    assert meta["alpha"] == 2 and meta["t"] == 4
    assert meta["line_vertices"] == inst.graph.n
    assert meta["line_edges"] == inst.graph.m
    assert inst.ranks is None


def test_generators_reject_bad_parameters():
    with pytest.raises(ValueError):
        layered_dimensions(0, 256)
    with pytest.raises(ValueError):
        layered_dimensions(1, 0)
    with pytest.raises(ValueError):
        path_graph(-1)


def test_build_graph_used_by_families_sorts_adjacency():
    g = build_graph(4, [(3, 0), (2, 0), (0, 1)])
    assert g.adj[0] == (1, 2, 3)
