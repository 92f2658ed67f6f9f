"""Undirected simple graphs on indexed vertices.

Every other module consumes this representation: vertices are ``0..n-1``,
edges are unordered pairs stored in normalized ``(min, max)`` form, and an
optional per-vertex label tuple carries provenance for constructed graphs.
Instances are immutable; all operations return new graphs.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import networkx as nx
import numpy as np

Edge = tuple[int, int]

INF = math.inf


class VertexRelation(Enum):
    EQUAL = "equal"
    ADJACENT = "adjacent"
    DISTINCT_NON_ADJACENT = "distinct-non-adjacent"


class FormatError(ValueError):
    """Malformed text input; carries a 1-based line number for diagnostics."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: no loops, no multi-edges, symmetric adjacency.

    ``labels``, when present, has length exactly ``n``; entries are opaque
    hashable tags (e.g. parity-vertex provenance) preserved positionally by
    unary operations.
    """

    n: int
    edges: frozenset[Edge]
    labels: tuple | None = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u},{v}) not normalized within 0..{self.n - 1}")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must have length exactly n")

    @cached_property
    def edge_list(self) -> tuple[Edge, ...]:
        """Edges in lexicographic order; fixes variable/edge indexing everywhere."""
        return tuple(sorted(self.edges))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(b)) for b in nbrs)

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _normalize_edge(u, v) in self.edges

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def incident_edges(self, v: int) -> tuple[Edge, ...]:
        return tuple(sorted(_normalize_edge(v, u) for u in self.adjacency[v]))

    def rel(self, x: int, y: int) -> VertexRelation:
        if x == y:
            return VertexRelation.EQUAL
        if self.has_edge(x, y):
            return VertexRelation.ADJACENT
        return VertexRelation.DISTINCT_NON_ADJACENT

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def relabel(self, images: tuple[int, ...]) -> "Graph":
        """Graph with vertex v renamed to images[v]; labels follow their vertex."""
        edges = frozenset(_normalize_edge(images[u], images[v]) for u, v in self.edges)
        labels = None
        if self.labels is not None:
            moved = [None] * self.n
            for v, lab in enumerate(self.labels):
                moved[images[v]] = lab
            labels = tuple(moved)
        return Graph(self.n, edges, labels)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


def graph(n: int, edges, labels=None) -> Graph:
    """Normalizing constructor: accepts any iterable of pairs."""
    return Graph(n, frozenset(_normalize_edge(u, v) for u, v in edges),
                 None if labels is None else tuple(labels))


# ---------------------------------------------------------------------------
# constructors

def empty_graph(n: int) -> Graph:
    return Graph(n, frozenset())


def complete_graph(n: int) -> Graph:
    return graph(n, itertools.combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise ValueError("both parts need at least one vertex")
    return graph(a + b, ((i, a + j) for i in range(a) for j in range(b)))


def path_graph(n: int) -> Graph:
    return graph(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return graph(n, ((i, (i + 1) % n) for i in range(n)))


def circulant(n: int, connection_set) -> Graph:
    """Vertices Z_n with i ~ j iff (i - j) mod n lies in the connection set.

    The connection set must exclude 0 and be closed under negation mod n,
    otherwise the relation would not be a simple symmetric adjacency.
    """
    conn = {c % n for c in connection_set}
    if 0 in conn:
        raise ValueError("connection set must not contain 0")
    if any((n - c) % n not in conn for c in conn):
        raise ValueError("connection set must be inverse-closed mod n")
    return graph(n, ((i, (i + c) % n) for i in range(n) for c in conn
                     if i != (i + c) % n))


def petersen() -> Graph:
    """Kneser graph on 2-subsets of a 5-set; vertices indexed in sorted pair order."""
    pairs = list(itertools.combinations(range(5), 2))
    index = {p: i for i, p in enumerate(pairs)}
    edges = [(index[p], index[q]) for p, q in itertools.combinations(pairs, 2)
             if not set(p) & set(q)]
    return graph(10, edges)


def random_graph(n: int, seed: int) -> Graph:
    """G(n, 1/2): each pair independently with probability 1/2, deterministic in seed."""
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.getrandbits(1)]
    return graph(n, edges)


# ---------------------------------------------------------------------------
# combinators

def disjoint_union(x: Graph, y: Graph) -> Graph:
    """Vertices of y shifted by x.n; labels wrap the originals with a side index."""
    edges = set(x.edges)
    edges.update(_normalize_edge(u + x.n, v + x.n) for u, v in y.edges)
    xl = x.labels if x.labels is not None else (None,) * x.n
    yl = y.labels if y.labels is not None else (None,) * y.n
    labels = tuple((0, lab) for lab in xl) + tuple((1, lab) for lab in yl)
    return Graph(x.n + y.n, frozenset(edges), labels)


def complement(x: Graph) -> Graph:
    edges = frozenset((u, v) for u, v in itertools.combinations(range(x.n), 2)
                      if (u, v) not in x.edges)
    return Graph(x.n, edges, x.labels)


# ---------------------------------------------------------------------------
# structure

def distance_matrix(x: Graph) -> list[list[float]]:
    """All-pairs BFS hop counts; unreachable pairs hold the ``inf`` sentinel."""
    dist = [[INF] * x.n for _ in range(x.n)]
    for s in range(x.n):
        row = dist[s]
        row[s] = 0
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for w in x.adjacency[u]:
                    if row[w] > d:
                        row[w] = d
                        nxt.append(w)
            frontier = nxt
    return dist


def distance_graph(x: Graph, d: int) -> Graph:
    if d < 1:
        raise ValueError("distance must be positive")
    dist = distance_matrix(x)
    return graph(x.n, ((u, v) for u in range(x.n) for v in range(u + 1, x.n)
                       if dist[u][v] == d), x.labels)


def components(x: Graph) -> tuple[tuple[int, ...], ...]:
    """Connected components as sorted vertex tuples, ordered by smallest vertex."""
    seen = [False] * x.n
    out = []
    for s in range(x.n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for w in x.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        out.append(tuple(sorted(comp)))
    return tuple(out)


def is_connected(x: Graph) -> bool:
    return len(components(x)) == 1


def is_planar(x: Graph) -> bool:
    """Planarity via the left-right (edge-addition) test."""
    return nx.check_planarity(x.to_networkx(), counterexample=False)[0]


def cut_vertices(x: Graph) -> tuple[int, ...]:
    """Vertices whose removal disconnects the graph; input must be connected."""
    if not is_connected(x):
        raise ValueError("cut-vertex search requires a connected graph")
    if x.n == 1:
        return ()
    out = []
    for v in range(x.n):
        rest = [u for u in range(x.n) if u != v]
        seen = {rest[0]}
        stack = [rest[0]]
        while stack:
            u = stack.pop()
            for w in x.adjacency[u]:
                if w != v and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != x.n - 1:
            out.append(v)
    return tuple(out)


def has_cut_vertex(x: Graph) -> bool:
    return bool(cut_vertices(x))


# ---------------------------------------------------------------------------
# text format: line 1 "n m", then m lines "u v" with 0 <= u < v < n,
# '#' starts a comment line, blank lines ignored, writer sorts edges.

def write_graph(x: Graph) -> str:
    lines = [f"{x.n} {x.m}"]
    lines.extend(f"{u} {v}" for u, v in x.edge_list)
    return "\n".join(lines) + "\n"


def read_graph(text: str) -> Graph:
    header: tuple[int, int] | None = None
    edges: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise FormatError(lineno, "expected header 'n m'")
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError(lineno, "header entries must be integers") from None
            if n < 1 or m < 0:
                raise FormatError(lineno, "need n >= 1 and m >= 0")
            header = (n, m)
            continue
        if len(parts) != 2:
            raise FormatError(lineno, "expected edge line 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(lineno, "edge endpoints must be integers") from None
        if not (0 <= u < v < header[0]):
            raise FormatError(lineno, f"edge ({u},{v}) must satisfy 0 <= u < v < n")
        if (u, v) in edges:
            raise FormatError(lineno, f"duplicate edge ({u},{v})")
        edges.append((u, v))
    if header is None:
        raise FormatError(1, "empty input: missing header 'n m'")
    if len(edges) != header[1]:
        raise FormatError(1, f"header announced {header[1]} edges, found {len(edges)}")
    return graph(header[0], edges)
