"""Graph generators: standard families plus the two adversarial constructions.

The adversarial families are:

* a clique with a pendant path whose ranks force truncated runs to leave the
  whole clique unsettled (``clique_plus_path``), and
* the line graph of a layered host graph whose degree profile makes early
  pivot rounds unproductive (``layered_line_graph``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from .graph import (
    Graph,
    RankAssignment,
    RankKind,
    build_graph,
    make_rng,
)

__all__ = [
    "AdversarialInstance",
    "LayeredDimensions",
    "LayeredHost",
    "path_graph",
    "cycle_graph",
    "petersen_graph",
    "erdos_renyi",
    "disjoint_cliques",
    "small_graphs",
    "clique_plus_path",
    "layered_dimensions",
    "layered_host",
    "layered_line_graph",
    "DEFAULT_EDGE_BUDGET",
]

DEFAULT_EDGE_BUDGET = 10_000_000


@dataclass(frozen=True)
class AdversarialInstance:
    """Graph plus optional fixed ranks and construction metadata."""

    graph: Graph
    ranks: RankAssignment | None
    metadata: dict


def path_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError(f"need n >= 3 for a cycle, got {n}")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def petersen_graph() -> Graph:
    """3-regular, girth 5: outer 5-cycle, inner 5-cycle with step 2, spokes."""
    edges = []
    for i in range(5):
        edges.append((i, (i + 1) % 5))
        edges.append((i, i + 5))
        edges.append((5 + i, 5 + (i + 2) % 5))
    return build_graph(10, edges)


def erdos_renyi(n: int, p: float, seed: int | np.random.Generator) -> Graph:
    """Each of the C(n, 2) pairs is an edge independently with probability p."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"need 0 <= p <= 1, got {p}")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < p
    edges = list(zip(iu[mask].tolist(), ju[mask].tolist()))
    return build_graph(n, edges)


def disjoint_cliques(sizes: Sequence[int]) -> Graph:
    """Vertex-disjoint cliques laid out consecutively."""
    if not sizes:
        raise ValueError("need at least one clique size")
    if any(s < 1 for s in sizes):
        raise ValueError(f"clique sizes must be >= 1, got {list(sizes)}")
    edges = []
    start = 0
    for s in sizes:
        for a in range(start, start + s):
            for b in range(a + 1, start + s):
                edges.append((a, b))
        start += s
    return build_graph(start, edges)


@lru_cache(maxsize=None)
def small_graphs(n: int) -> tuple[Graph, ...]:
    """Every simple graph on n vertices, one per isomorphism class.

    Canonical form is the smallest edge bitmask over all vertex relabelings,
    computed for all 2^C(n,2) masks at once.  Sized for exhaustive small-n
    sweeps; n is capped at 6 (156 classes).
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > 6:
        raise ValueError(f"isomorphism enumeration capped at n=6, got {n}")
    pairs = list(combinations(range(n), 2))
    nbits = len(pairs)
    bit_of = {p: i for i, p in enumerate(pairs)}
    masks = np.arange(1 << nbits, dtype=np.int64)
    canon = masks.copy()
    for perm in permutations(range(n)):
        permuted = np.zeros_like(masks)
        for i, (a, b) in enumerate(pairs):
            pa, pb = perm[a], perm[b]
            dest = bit_of[(pa, pb) if pa < pb else (pb, pa)]
            permuted |= ((masks >> i) & 1) << dest
        np.minimum(canon, permuted, out=canon)
    out = []
    for mask in np.unique(canon).tolist():
        edges = [pairs[i] for i in range(nbits) if (mask >> i) & 1]
        out.append(build_graph(n, edges))
    return tuple(out)


def clique_plus_path(clique_n: int, r: int) -> AdversarialInstance:
    """Complete graph on ``clique_n`` vertices with a pendant path of 2r vertices.

    Vertices 0..2r-1 form the path (0 is the free end), vertex 2r-1 attaches
    to clique vertex 2r, and the clique occupies ids 2r..2r+clique_n-1.  The
    fixed ranks are the identity: path ranks increase toward the clique and
    clique ranks continue in id order, which keeps every pivot of the first r
    truncated rounds on the path and leaves the entire clique unsettled.
    """
    if clique_n < 2:
        raise ValueError(f"need clique size >= 2, got {clique_n}")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    tail = 2 * r
    n = clique_n + tail
    edges = [(i, i + 1) for i in range(tail)]
    for a in range(tail, n):
        for b in range(a + 1, n):
            edges.append((a, b))
    g = build_graph(n, edges)
    ranks = RankAssignment(RankKind.PERMUTATION, tuple(range(n)))
    meta = {
        "kind": "clique_plus_path",
        "clique_n": clique_n,
        "rounds": r,
        "path_vertices": tail,
        "clique_vertices": list(range(tail, n)),
    }
    return AdversarialInstance(graph=g, ranks=ranks, metadata=meta)


@dataclass(frozen=True)
class LayeredHost:
    """Layered host graph whose line graph is the hard instance.

    ``t`` layers with sizes growing by factor ``alpha`` toward layer t, a
    perfect matching inside the last layer, and biregular bipartite wiring
    between consecutive layers: every vertex of layer i sends
    ``alpha**(2*(t-i))`` edges right and receives ``alpha**(2*(t-i)+1)``
    edges from the left.
    """

    graph: Graph
    t: int
    alpha: int
    n_requested: int
    n_used: int
    layer_sizes: tuple[int, ...]
    layer_offsets: tuple[int, ...]
    right_degrees: tuple[int, ...]
    left_degrees: tuple[int, ...]
    edge_layers: tuple[int, ...] = field(repr=False)

    def layer_of(self, v: int) -> int:
        for i, off in enumerate(self.layer_offsets):
            if v < off + self.layer_sizes[i]:
                return i + 1
        raise ValueError(f"vertex {v} outside host graph")


def _integer_root_floor(x: int, k: int) -> int:
    """Largest a >= 1 with a**k <= x."""
    a = max(1, int(round(x ** (1.0 / k))))
    while a**k > x:
        a -= 1
    while (a + 1) ** k <= x:
        a += 1
    return a


@dataclass(frozen=True)
class LayeredDimensions:
    """Resolved shape of a layered host, computable without building it."""

    r: int
    t: int
    alpha: int
    n_requested: int
    n_used: int
    layer_sizes: tuple[int, ...]
    host_vertices: int
    host_edges: int


def layered_dimensions(r: int, top_layer_n: int) -> LayeredDimensions:
    """Resolve the layered-host shape a size request produces.

    The scale factor is the largest integer ``alpha >= 2`` the requested last
    layer can support, and the size is then rounded up so that all layer
    sizes are integral and the last layer is even; requests below the
    smallest feasible size are rounded up to it.  Feasibility needs the last
    layer at least alpha**(3t-4) so the leftmost bipartite block is simple.
    """
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    if top_layer_n < 1:
        raise ValueError(f"need a positive layer size, got {top_layer_n}")
    t = 2 * r + 2
    exponent = 3 * t - 4
    alpha = max(2, _integer_root_floor(top_layer_n, exponent))
    step = alpha ** (t - 1)
    n_used = max(top_layer_n, alpha**exponent)
    n_used = -(-n_used // step) * step
    while n_used % 2 != 0:
        n_used += step
    sizes = tuple(n_used // alpha ** (t - i) for i in range(1, t + 1))
    # Matching inside the last layer plus sum over layers i<t of
    # |V_i| * alpha**(2(t-i)) = n_used * alpha**(t-i) bipartite edges.
    host_edges = n_used // 2 + n_used * sum(alpha**j for j in range(1, t))
    return LayeredDimensions(
        r=r,
        t=t,
        alpha=alpha,
        n_requested=top_layer_n,
        n_used=n_used,
        layer_sizes=sizes,
        host_vertices=sum(sizes),
        host_edges=host_edges,
    )


def layered_host(r: int, top_layer_n: int) -> LayeredHost:
    """Build the host graph for ``layered_line_graph``.

    ``top_layer_n`` requests the size of the last layer; the resolved shape
    is whatever :func:`layered_dimensions` reports for the same request.
    """
    dims = layered_dimensions(r, top_layer_n)
    t, alpha, n_used = dims.t, dims.alpha, dims.n_used
    sizes = dims.layer_sizes
    offsets = tuple(sum(sizes[:i]) for i in range(t))
    right_deg = tuple(alpha ** (2 * (t - i)) for i in range(1, t))  # layers 1..t-1
    left_deg = tuple(alpha ** (2 * (t - i) + 1) for i in range(2, t + 1))  # layers 2..t
    for i in range(t - 1):
        if right_deg[i] > sizes[i + 1]:
            raise ValueError(
                f"layer {i + 1} right degree {right_deg[i]} exceeds "
                f"next layer size {sizes[i + 1]}"
            )
        if left_deg[i] > sizes[i]:
            raise ValueError(
                f"layer {i + 2} left degree {left_deg[i]} exceeds "
                f"previous layer size {sizes[i]}"
            )

    edges: list[tuple[int, int]] = []
    edge_layers: list[int] = []
    # Perfect matching inside the last layer, recorded as layer index t.
    top = offsets[-1]
    for j in range(0, sizes[-1], 2):
        edges.append((top + j, top + j + 1))
        edge_layers.append(t)
    # Circulant biregular wiring between consecutive layers; block i covers
    # positions j*dr .. j*dr+dr-1 (mod next layer size), so each right vertex
    # receives exactly size_i * dr / size_{i+1} edges.
    for i in range(t - 1):
        a, b = sizes[i], sizes[i + 1]
        dr = right_deg[i]
        off_a, off_b = offsets[i], offsets[i + 1]
        for j in range(a):
            base = j * dr
            for k in range(dr):
                edges.append((off_a + j, off_b + (base + k) % b))
                edge_layers.append(i + 1)
    g = build_graph(sum(sizes), edges)
    return LayeredHost(
        graph=g,
        t=t,
        alpha=alpha,
        n_requested=top_layer_n,
        n_used=n_used,
        layer_sizes=sizes,
        layer_offsets=offsets,
        right_degrees=right_deg,
        left_degrees=left_deg,
        edge_layers=tuple(edge_layers),
    )


def line_graph_size(host: Graph) -> tuple[int, int]:
    """(vertex count, edge count) of the line graph without building it."""
    n = host.m
    m = sum(d * (d - 1) // 2 for d in (len(a) for a in host.adj))
    return n, m


def layered_line_graph(
    r: int, top_layer_n: int, edge_budget: int = DEFAULT_EDGE_BUDGET
) -> AdversarialInstance:
    """Line graph of :func:`layered_host`; pivots on it are host matchings.

    Line-graph vertex i is the i-th host edge in lexicographic order; two
    line-graph vertices are adjacent iff their host edges share an endpoint.
    Rejects constructions whose line graph exceeds ``edge_budget`` edges.
    """
    host = layered_host(r, top_layer_n)
    n_line, m_line = line_graph_size(host.graph)
    if m_line > edge_budget:
        raise ValueError(
            f"line graph needs {m_line} edges, over the budget of {edge_budget}; "
            f"lower the requested layer size"
        )
    host_edges = list(host.graph.edges())
    index = {e: i for i, e in enumerate(host_edges)}
    edges: list[tuple[int, int]] = []
    for v in range(host.graph.n):
        inc = [
            index[(v, w) if v < w else (w, v)] for w in host.graph.adj[v]
        ]
        for x in range(len(inc)):
            for y in range(x + 1, len(inc)):
                a, b = inc[x], inc[y]
                edges.append((a, b) if a < b else (b, a))
    g = build_graph(n_line, edges)
    meta = {
        "kind": "layered_line_graph",
        "rounds": r,
        "t": host.t,
        "alpha": host.alpha,
        "top_layer_requested": host.n_requested,
        "top_layer_used": host.n_used,
        "layer_sizes": list(host.layer_sizes),
        "right_degrees": list(host.right_degrees),
        "left_degrees": list(host.left_degrees),
        "host_vertices": host.graph.n,
        "host_edges": host.graph.m,
        "line_vertices": n_line,
        "line_edges": m_line,
    }
    return AdversarialInstance(graph=g, ranks=None, metadata=meta)
