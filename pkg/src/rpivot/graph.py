"""Core graph, rank, and clustering types.

Vertices are dense 0-based integers.  Graphs are simple, undirected, and
immutable after construction.  Rank assignments come in two kinds: a uniform
permutation of [0, n) or i.i.d. integer draws from [0, n**c); every comparison
of two vertices' ranks is lexicographic on (rank, vertex id), so ties between
equal integer ranks always break toward the smaller vertex id.

Costs are exact integer disagreement counts: edges cut between clusters plus
non-adjacent pairs kept inside a cluster.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Graph",
    "RankKind",
    "RankAssignment",
    "Clustering",
    "GraphFormatError",
    "build_graph",
    "is_edge",
    "clustering_cost",
    "is_refinement",
    "same_partition",
    "make_rng",
    "substream",
    "random_permutation",
    "random_integer_ranks",
    "read_graph_text",
    "write_graph_text",
    "read_edge_list",
]

DEFAULT_RANK_EXPONENT = 3


class GraphFormatError(ValueError):
    """Raised for malformed graph text input."""


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Return the package-wide generator (PCG64) for ``seed``.

    Passing an existing Generator returns it unchanged so callers can thread
    one stream through several draws.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substream(seed: int, *path: int) -> np.random.Generator:
    """Derived independent stream for trial-level parallelism.

    The stream is a pure function of (seed, path), so per-trial results do not
    depend on scheduling order.
    """
    return np.random.default_rng(np.random.SeedSequence((seed, *path)))


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph with sorted adjacency."""

    n: int
    adj: tuple[tuple[int, ...], ...]
    m: int
    nbr_sets: tuple[frozenset[int], ...] = field(repr=False, compare=False, default=())

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as (u, v) with u < v, lexicographically."""
        for u in range(self.n):
            for v in self.adj[u]:
                if v > u:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.nbr_sets[u]


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Validate and build a Graph from an edge iterable.

    Rejects endpoints outside [0, n), self loops, and duplicate edges
    (either orientation).
    """
    if n < 0:
        raise ValueError(f"vertex count must be nonnegative, got {n}")
    seen: set[tuple[int, int]] = set()
    lists: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        u = int(u)
        v = int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        if u == v:
            raise ValueError(f"self loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise ValueError(f"duplicate edge {key}")
        seen.add(key)
        lists[u].append(v)
        lists[v].append(u)
    adj = tuple(tuple(sorted(a)) for a in lists)
    sets = tuple(frozenset(a) for a in adj)
    return Graph(n=n, adj=adj, m=len(seen), nbr_sets=sets)


def is_edge(g: Graph, u: int, v: int) -> bool:
    """Edge membership by bisection on the sorted adjacency of ``u``."""
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise ValueError(f"pair ({u}, {v}) outside [0, {g.n})")
    if u == v:
        return False
    row = g.adj[u]
    i = bisect_left(row, v)
    return i < len(row) and row[i] == v


class RankKind(Enum):
    PERMUTATION = "permutation"
    INTEGER = "integer"


@dataclass(frozen=True)
class RankAssignment:
    """Per-vertex ranks plus the kind that generated them.

    ``key(v)`` gives the total order actually used everywhere: (rank, id).
    For permutations the id component never decides a comparison.
    """

    kind: RankKind
    ranks: tuple[int, ...]
    c: int | None = None

    def __post_init__(self) -> None:
        n = len(self.ranks)
        if self.kind is RankKind.PERMUTATION:
            if sorted(self.ranks) != list(range(n)):
                raise ValueError("permutation ranks must be exactly {0..n-1}")
        else:
            if self.c is None or self.c < 1:
                raise ValueError("integer ranks need exponent c >= 1")
            limit = n**self.c if n > 0 else 1
            for r in self.ranks:
                if not (0 <= r < max(limit, 1)):
                    raise ValueError(f"rank {r} outside [0, n**c)")

    @property
    def n(self) -> int:
        return len(self.ranks)

    def key(self, v: int) -> tuple[int, int]:
        return (self.ranks[v], v)

    def order(self) -> list[int]:
        """All vertices sorted ascending by (rank, id)."""
        return sorted(range(self.n), key=self.key)

    def rank_of(self, v: int) -> int:
        return self.ranks[v]


def random_permutation(n: int, seed: int | np.random.Generator) -> RankAssignment:
    """Uniform permutation of [0, n) as a rank assignment."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = make_rng(seed)
    ranks = tuple(int(x) for x in rng.permutation(n))
    return RankAssignment(RankKind.PERMUTATION, ranks)


def random_integer_ranks(
    n: int, c: int, seed: int | np.random.Generator
) -> RankAssignment:
    """I.i.d. uniform ranks from [0, n**c), ties broken later by vertex id."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if c < 1:
        raise ValueError(f"need c >= 1, got {c}")
    limit = n**c
    if limit.bit_length() > 128:
        raise ValueError(f"n**c = {n}**{c} does not fit in 128 bits")
    rng = make_rng(seed)
    if limit <= 2**63:
        ranks = tuple(int(x) for x in rng.integers(0, limit, size=n, dtype=np.int64))
    else:
        ranks = tuple(_uniform_big(rng, limit) for _ in range(n))
    return RankAssignment(RankKind.INTEGER, ranks, c=c)


def _uniform_big(rng: np.random.Generator, limit: int) -> int:
    # Unbiased rejection sampling over 128-bit draws.
    span = (1 << 128) // limit * limit
    while True:
        hi, lo = rng.integers(0, 1 << 64, size=2, dtype=np.uint64)
        x = (int(hi) << 64) | int(lo)
        if x < span:
            return x % limit


@dataclass(frozen=True)
class Clustering:
    """Partition of [0, n) into clusters with dense ids [0, num_clusters)."""

    ids: tuple[int, ...]
    num_clusters: int

    def __post_init__(self) -> None:
        if self.ids:
            seen = set(self.ids)
            if seen != set(range(self.num_clusters)):
                raise ValueError("cluster ids must be dense in [0, num_clusters)")
        elif self.num_clusters != 0:
            raise ValueError("empty clustering must have zero clusters")

    @property
    def n(self) -> int:
        return len(self.ids)

    def sizes(self) -> list[int]:
        out = [0] * self.num_clusters
        for c in self.ids:
            out[c] += 1
        return out

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_clusters)]
        for v, c in enumerate(self.ids):
            out[c].append(v)
        return out


def clustering_cost(g: Graph, clustering: Clustering) -> int:
    """Exact disagreement count: cut edges plus non-adjacent co-clustered pairs."""
    if clustering.n != g.n:
        raise ValueError("clustering and graph disagree on n")
    ids = clustering.ids
    cut = 0
    for u, v in g.edges():
        if ids[u] != ids[v]:
            cut += 1
    inside_pairs = sum(s * (s - 1) // 2 for s in clustering.sizes())
    intra_edges = g.m - cut
    return cut + (inside_pairs - intra_edges)


def is_refinement(fine: Clustering, coarse: Clustering) -> bool:
    """True iff every cluster of ``fine`` lies inside one cluster of ``coarse``."""
    if fine.n != coarse.n:
        raise ValueError("clusterings disagree on n")
    image: dict[int, int] = {}
    for v in range(fine.n):
        f = fine.ids[v]
        c = coarse.ids[v]
        if f in image:
            if image[f] != c:
                return False
        else:
            image[f] = c
    return True


def same_partition(a: Clustering, b: Clustering) -> bool:
    """Equality as partitions, ignoring cluster numbering."""
    if a.n != b.n:
        return False
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    for x, y in zip(a.ids, b.ids):
        if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
            return False
    return True


def write_graph_text(g: Graph, path: str | Path) -> None:
    """Write the text format: header ``n m`` then one ``u v`` line per edge.

    Edges are emitted with u < v in lexicographic order.
    """
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph_text(path: str | Path) -> Graph:
    """Parse the text format written by :func:`write_graph_text`.

    Lines starting with ``#`` are comments.  Vertex ids must already be dense
    0-based integers; use :func:`read_edge_list` for arbitrary labels.
    """
    tokens: list[list[str]] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"{path}:{lineno}: expected two fields, got {raw!r}")
        tokens.append(parts)
    if not tokens:
        raise GraphFormatError(f"{path}: missing 'n m' header")
    try:
        n, m = (int(x) for x in tokens[0])
    except ValueError as exc:
        raise GraphFormatError(f"{path}: bad header {tokens[0]!r}") from exc
    body = tokens[1:]
    if len(body) != m:
        raise GraphFormatError(f"{path}: header promises {m} edges, found {len(body)}")
    try:
        edges = [(int(a), int(b)) for a, b in body]
    except ValueError as exc:
        raise GraphFormatError(f"{path}: non-integer edge endpoint") from exc
    try:
        return build_graph(n, edges)
    except ValueError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc


def read_edge_list(path: str | Path) -> tuple[Graph, dict[str, int]]:
    """Parse a headerless edge list with arbitrary labels.

    Labels are remapped to dense 0-based ids in first-appearance order; the
    mapping is returned so results can be translated back.
    """
    mapping: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"{path}:{lineno}: expected two fields, got {raw!r}")
        ids = []
        for label in parts:
            if label not in mapping:
                mapping[label] = len(mapping)
            ids.append(mapping[label])
        edges.append((ids[0], ids[1]))
    try:
        g = build_graph(len(mapping), edges)
    except ValueError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
    return g, mapping
