"""Parity game graphs of a connected base graph Z and their automorphisms.

A parity vertex is a pair (anchor, S) with S a subset of the anchor's
incident edges; the even-parity graph takes S even everywhere, the marked
variant takes S odd at one chosen vertex.  Two parity vertices are adjacent
when their anchors are adjacent in Z and the connecting edge lies in exactly
one of the two subsets.

Three explicit automorphism families are provided: automorphisms of Z lifted
coordinatewise, symmetric-difference maps of even subgraphs of Z, and the
fiber transporters obtained by composing cycle maps along paths avoiding the
anchor.  Together they certify vertex transitivity of the even-parity graph
whenever Z is connected and vertex transitive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .coherent import WlComparison, cospectral_report, wl_closure, wl_comparison
from .graphs import (Edge, Graph, complement, cut_vertices, disjoint_union, graph,
                     is_connected, is_planar)
from .symmetry import (Permutation, PermutationGroup, automorphism_group,
                       find_isomorphism, is_automorphism, orbits)


@dataclass(frozen=True)
class ParityVertex:
    anchor: int
    edge_subset: frozenset[Edge]

    def mask(self, z: Graph) -> int:
        """Bitmask over the anchor's sorted incident edge list (bit i = i-th edge)."""
        incident = z.incident_edges(self.anchor)
        return sum(1 << i for i, e in enumerate(incident) if e in self.edge_subset)


def _subsets_in_pattern_order(edges: tuple[Edge, ...], parity: int) -> list[frozenset[Edge]]:
    """Subsets with the given parity, ordered lexicographically as 0/1 patterns
    over the sorted edge list (first edge is the most significant position)."""
    d = len(edges)
    out = []
    for bits in range(1 << d):
        pattern = [(bits >> (d - 1 - i)) & 1 for i in range(d)]
        if sum(pattern) % 2 == parity:
            out.append(frozenset(e for i, e in enumerate(edges) if pattern[i]))
    return out


def parity_vertices(z: Graph, marked: int | None = None) -> tuple[ParityVertex, ...]:
    """All parity vertices in canonical order: anchors ascending, subsets in
    pattern order; parity is even except at the marked anchor (odd)."""
    out = []
    for anchor in range(z.n):
        parity = 1 if anchor == marked else 0
        for subset in _subsets_in_pattern_order(z.incident_edges(anchor), parity):
            out.append(ParityVertex(anchor, subset))
    return tuple(out)


def _build(z: Graph, marked: int | None) -> Graph:
    if not is_connected(z):
        raise ValueError("parity game graphs need a connected base graph")
    if marked is not None and z.degree(marked) == 0:
        raise ValueError("marked vertex must have at least one incident edge")
    vertices = parity_vertices(z, marked)
    edges = []
    by_anchor: dict[int, list[int]] = {}
    for i, pv in enumerate(vertices):
        by_anchor.setdefault(pv.anchor, []).append(i)
    for u, v in z.edges:
        e = (u, v)
        for i in by_anchor.get(u, ()):
            s = vertices[i].edge_subset
            for j in by_anchor.get(v, ()):
                t = vertices[j].edge_subset
                if (e in s) != (e in t):
                    edges.append((i, j) if i < j else (j, i))
    return graph(len(vertices), edges, labels=vertices)


def build_x0(z: Graph) -> Graph:
    """Even-parity game graph; vertex count is the sum over anchors of 2^(deg-1)."""
    return _build(z, None)


def build_x(z: Graph, marked: int) -> Graph:
    """Marked-parity game graph: subsets odd at the marked anchor, even elsewhere."""
    if not (0 <= marked < z.n):
        raise ValueError("marked vertex out of range")
    return _build(z, marked)


@lru_cache(maxsize=32)
def _x0_with_index(z: Graph) -> tuple[Graph, dict[ParityVertex, int]]:
    g = build_x0(z)
    return g, {pv: i for i, pv in enumerate(g.labels)}


def _map_edge(sigma: Permutation, e: Edge) -> Edge:
    a, b = sigma(e[0]), sigma(e[1])
    return (a, b) if a < b else (b, a)


def lift_automorphism(z: Graph, sigma: Permutation) -> Permutation:
    """(anchor, S) -> (sigma(anchor), sigma(S)), verified on the even-parity graph."""
    if not is_automorphism(z, sigma):
        raise ValueError("the supplied permutation is not an automorphism of the base graph")
    x0, index = _x0_with_index(z)
    images = [0] * x0.n
    for i, pv in enumerate(x0.labels):
        target = ParityVertex(sigma(pv.anchor),
                              frozenset(_map_edge(sigma, e) for e in pv.edge_subset))
        images[i] = index[target]
    lifted = Permutation(tuple(images))
    if not is_automorphism(x0, lifted):  # pragma: no cover
        raise RuntimeError("lift of a base automorphism failed the adjacency check")
    return lifted


def _is_even_subgraph(z: Graph, f_edges: frozenset[Edge]) -> bool:
    for v in range(z.n):
        if sum(1 for e in z.incident_edges(v) if e in f_edges) % 2:
            return False
    return True


def even_subgraph_automorphism(z: Graph, f_edges) -> Permutation:
    """(anchor, S) -> (anchor, S symmetric-difference (incident edges in F)).

    F must be the edge set of an even subgraph: every vertex meets it an even
    number of times, so parity is preserved fiberwise.
    """
    f = frozenset(tuple(sorted(e)) for e in f_edges)
    if not f <= z.edges:
        raise ValueError("F must be a subset of the base graph's edges")
    if not _is_even_subgraph(z, f):
        raise ValueError("F is not an even subgraph: some vertex meets it oddly")
    x0, index = _x0_with_index(z)
    images = [0] * x0.n
    for i, pv in enumerate(x0.labels):
        incident_in_f = frozenset(e for e in z.incident_edges(pv.anchor) if e in f)
        images[i] = index[ParityVertex(pv.anchor, pv.edge_subset ^ incident_in_f)]
    perm = Permutation(tuple(images))
    if not is_automorphism(x0, perm):  # pragma: no cover
        raise RuntimeError("even-subgraph map failed the adjacency check")
    return perm


def _bfs_path(z: Graph, avoid: int, src: int, dst: int) -> list[int]:
    """Shortest path avoiding one vertex, lowest-index tie-breaking via sorted BFS."""
    parent = {src: src}
    frontier = [src]
    while frontier and dst not in parent:
        nxt = []
        for u in frontier:
            for w in z.adjacency[u]:
                if w != avoid and w not in parent:
                    parent[w] = u
                    nxt.append(w)
        frontier = nxt
    if dst not in parent:
        raise ValueError(f"no path from {src} to {dst} avoiding vertex {avoid}")
    path = [dst]
    while path[-1] != src:
        path.append(parent[path[-1]])
    return path[::-1]


def _transport_cycles(z: Graph, anchor: int, s: frozenset[Edge],
                      t: frozenset[Edge]) -> list[frozenset[Edge]]:
    """Cycles through the anchor whose combined symmetric difference moves s to t.

    The difference s ^ t is sorted and paired consecutively; each pair {e, f}
    with far endpoints j, k closes the lexicographically-least shortest path
    from j to k in Z minus the anchor into a cycle containing e and f.
    """
    diff = sorted(s ^ t)
    cycles = []
    for e, f in zip(diff[::2], diff[1::2]):
        j = e[0] if e[1] == anchor else e[1]
        k = f[0] if f[1] == anchor else f[1]
        path = _bfs_path(z, anchor, j, k)
        cycle = {e, f}
        for a, b in zip(path, path[1:]):
            cycle.add((a, b) if a < b else (b, a))
        cycles.append(frozenset(cycle))
    return cycles


def fiber_transporter(z: Graph, anchor: int, s, t) -> Permutation:
    """Automorphism of the even-parity graph mapping (anchor, s) to (anchor, t).

    Requires a connected base graph with no cut-vertex and two even subsets
    of the anchor's incident edges.
    """
    s = frozenset(tuple(sorted(e)) for e in s)
    t = frozenset(tuple(sorted(e)) for e in t)
    incident = set(z.incident_edges(anchor))
    if not (s <= incident and t <= incident):
        raise ValueError("subsets must consist of edges incident to the anchor")
    if len(s) % 2 or len(t) % 2:
        raise ValueError("subsets must have even parity")
    if cut_vertices(z):
        raise ValueError("fiber transport requires a base graph with no cut-vertex")
    x0, index = _x0_with_index(z)
    perm = Permutation.identity(x0.n)
    for cycle in _transport_cycles(z, anchor, s, t):
        perm = even_subgraph_automorphism(z, cycle) * perm
    src, dst = index[ParityVertex(anchor, s)], index[ParityVertex(anchor, t)]
    if perm(src) != dst:  # pragma: no cover
        raise RuntimeError("fiber transporter missed its target")
    return perm


# ---------------------------------------------------------------------------
# vertex-transitivity certificate

WordStep = tuple  # ("lift", base images) | ("cycle", sorted edge tuple)


@dataclass(frozen=True)
class TransportEntry:
    target: int
    word: tuple[WordStep, ...]
    permutation: Permutation


@dataclass(frozen=True)
class TransitivityCertificate:
    """Per target vertex, a verified automorphism word mapping the base to it.

    Words are one lifted base automorphism followed by the cycle maps of one
    fiber transporter.  A transporter between arbitrary ordered pairs is the
    composition entry(b) * entry(a)^-1.
    """

    base: int
    entries: tuple[TransportEntry, ...]

    def transporter(self, a: int, b: int) -> Permutation:
        by_target = {e.target: e.permutation for e in self.entries}
        return by_target[b] * by_target[a].inverse()

    def covers_all(self, n: int) -> bool:
        return sorted(e.target for e in self.entries) == list(range(n))


def _transversal_to(group: PermutationGroup, src: int) -> dict[int, Permutation]:
    """One group element mapping src to each vertex of its orbit."""
    reach = {src: Permutation.identity(group.degree)}
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for g in group.generators:
                w = g(v)
                if w not in reach:
                    reach[w] = g * reach[v]
                    nxt.append(w)
        frontier = nxt
    return reach


def certify_vertex_transitive_x0(z: Graph,
                                 z_group: PermutationGroup | None = None) -> TransitivityCertificate:
    """Build and verify transport words from the base vertex to every vertex.

    Preconditions: z connected and vertex transitive (reported separately on
    failure).  Vertex transitivity of z rules out cut-vertices, so the fiber
    transporters exist.
    """
    if not is_connected(z):
        raise ValueError("precondition failed: base graph is not connected")
    if z_group is None:
        z_group = automorphism_group(z)
    if len(z_group.orbit_partition) != 1:
        raise ValueError("precondition failed: base graph is not vertex transitive")
    x0, index = _x0_with_index(z)
    base = 0
    base_pv: ParityVertex = x0.labels[base]
    reach = _transversal_to(z_group, base_pv.anchor)
    entries = []
    for target, pv in enumerate(x0.labels):
        sigma = reach[pv.anchor]
        lifted = lift_automorphism(z, sigma)
        mid: ParityVertex = x0.labels[lifted(base)]
        cycles = _transport_cycles(z, pv.anchor, mid.edge_subset, pv.edge_subset)
        perm = lifted
        word: list[WordStep] = [("lift", sigma.images)]
        for cycle in cycles:
            perm = even_subgraph_automorphism(z, cycle) * perm
            word.append(("cycle", tuple(sorted(cycle))))
        if perm(base) != target or not is_automorphism(x0, perm):
            raise RuntimeError(f"transport word for vertex {target} failed verification")
        entries.append(TransportEntry(target, tuple(word), perm))
    return TransitivityCertificate(base, tuple(entries))


# ---------------------------------------------------------------------------
# the full witness pipeline

@dataclass(frozen=True)
class WitnessChecks:
    non_isomorphic: bool
    wl_equivalent: bool
    edge_class_mapped: bool
    first_vertex_transitive: bool
    second_vertex_transitive: bool
    union_vertex_transitive: bool
    cospectral: bool

    @property
    def all_pass(self) -> bool:
        return (self.non_isomorphic and self.wl_equivalent and self.edge_class_mapped
                and self.first_vertex_transitive and not self.union_vertex_transitive
                and self.cospectral)


@dataclass(frozen=True)
class WitnessReport:
    """Two parity game graphs with everything needed to certify the pair.

    The pair is proved non-isomorphic by exhaustive search, equivalent under
    pair refinement with the adjacency classes matched, cospectral for the
    three standard matrices, the even-parity side vertex transitive by
    explicit certificate, and the disjoint union not vertex transitive.
    """

    base: Graph
    marked: int
    complemented: bool
    first: Graph
    second: Graph
    union: Graph
    checks: WitnessChecks
    comparison: WlComparison
    transitivity: TransitivityCertificate
    union_orbit_count: int
    wl_diagonal_mixes_sides: bool
    aut_orbits_separate_sides: bool

    @property
    def all_pass(self) -> bool:
        return self.checks.all_pass

    def to_dict(self) -> dict:
        return {
            "base": {"n": self.base.n, "m": self.base.m},
            "marked": self.marked,
            "complemented": self.complemented,
            "graphs": {
                "first": {"n": self.first.n, "m": self.first.m},
                "second": {"n": self.second.n, "m": self.second.m},
                "union": {"n": self.union.n, "m": self.union.m},
            },
            "checks": {
                "non_isomorphic": self.checks.non_isomorphic,
                "wl_equivalent": self.checks.wl_equivalent,
                "edge_class_mapped": self.checks.edge_class_mapped,
                "first_vertex_transitive": self.checks.first_vertex_transitive,
                "second_vertex_transitive": self.checks.second_vertex_transitive,
                "union_not_vertex_transitive": not self.checks.union_vertex_transitive,
                "cospectral": self.checks.cospectral,
            },
            "wl_classes": self.comparison.config_x.r if self.comparison.certificate else None,
            "union_orbit_count": self.union_orbit_count,
            "wl_diagonal_mixes_sides": self.wl_diagonal_mixes_sides,
            "aut_orbits_separate_sides": self.aut_orbits_separate_sides,
            "all_pass": self.all_pass,
        }


def witness_pair(z: Graph, marked: int = 0, complemented: bool = False) -> WitnessReport:
    """Run the whole pipeline on a connected, vertex-transitive, non-planar base.

    With ``complemented`` the emitted pair and union are complements, giving
    connected witnesses; the checks are re-run on the emitted graphs.
    """
    if not is_connected(z):
        raise ValueError("precondition failed: base graph is not connected")
    if is_planar(z):
        raise ValueError(
            "precondition failed: base graph is planar, so its parity system has "
            "no operator solution and the construction yields no quantum witness")
    z_group = automorphism_group(z)
    if len(z_group.orbit_partition) != 1:
        raise ValueError("precondition failed: base graph is not vertex transitive")

    x0 = build_x0(z)
    x1 = build_x(z, marked)
    plain_union = disjoint_union(x0, x1)
    if complemented:
        first, second, union = complement(x0), complement(x1), complement(plain_union)
    else:
        first, second, union = x0, x1, plain_union

    second_group = automorphism_group(second)
    iso = find_isomorphism(first, second, y_group=second_group)
    comparison = wl_comparison(first, second)
    transitivity = certify_vertex_transitive_x0(z, z_group=z_group)
    first_vt = all(is_automorphism(first, e.permutation) for e in transitivity.entries) \
        and transitivity.covers_all(first.n)
    second_vt = len(second_group.orbit_partition) == 1
    union_group = automorphism_group(union)
    union_orbits = orbits(union_group)
    spectra = cospectral_report(first, second)

    union_wl = wl_closure(union)
    sides = [set(range(x0.n)), set(range(x0.n, union.n))]
    diag_colors = [
        {int(union_wl.colors[v, v]) for v in side} for side in sides
    ]
    wl_mixes = bool(diag_colors[0] & diag_colors[1])
    aut_separates = all(
        set(orbit) <= sides[0] or set(orbit) <= sides[1] for orbit in union_orbits
    )

    checks = WitnessChecks(
        non_isomorphic=iso is None,
        wl_equivalent=comparison.equivalent,
        edge_class_mapped=bool(comparison.certificate and comparison.certificate.maps_edge_classes),
        first_vertex_transitive=first_vt,
        second_vertex_transitive=second_vt,
        union_vertex_transitive=len(union_orbits) == 1,
        cospectral=spectra.all_agree,
    )
    return WitnessReport(
        base=z, marked=marked, complemented=complemented,
        first=first, second=second, union=union,
        checks=checks, comparison=comparison, transitivity=transitivity,
        union_orbit_count=len(union_orbits),
        wl_diagonal_mixes_sides=wl_mixes,
        aut_orbits_separate_sides=aut_separates,
    )


# ---------------------------------------------------------------------------
# label sidecar: lines "v anchor subset-bitmask" for parity-labeled graphs

def write_parity_labels(g: Graph, z: Graph) -> str:
    lines = []
    for v, pv in enumerate(g.labels):
        lines.append(f"{v} {pv.anchor} {pv.mask(z)}")
    return "\n".join(lines) + "\n"
