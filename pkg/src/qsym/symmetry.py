"""Classical automorphism groups and their orbit/orbital machinery.

The automorphism search is individualization-refinement backtracking: vertex
colors are refined to a stable partition, the first vertex of the first
non-singleton cell is individualized, and automorphisms surface as pairs of
discrete leaves with identical colored adjacency.  Subtrees whose refined
color histogram cannot match the first root-to-leaf path are pruned, and a
sibling candidate is skipped when an already-discovered automorphism fixing
the individualized prefix maps an explored candidate onto it.

Group order goes through a stabilizer chain; orbit and orbital partitions
come from union-find closures under the generators.  Haar and commutant
arithmetic is exact (integers and fractions), never floating point.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np

from .coherent import CoherentConfiguration, wl_closure
from .graphs import FormatError, Graph

HAAR_ENUMERATION_BOUND = 10**6


# ---------------------------------------------------------------------------
# permutations

@dataclass(frozen=True)
class Permutation:
    """Bijection on 0..n-1 stored as its image array."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError("not a permutation of 0..n-1")

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, v: int) -> int:
        return self.images[v]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition: (p * q)(v) = p(q(v))."""
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for v, w in enumerate(self.images):
            inv[w] = v
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == v for v, i in enumerate(self.images))


def is_automorphism(x: Graph, p: Permutation) -> bool:
    """Exact check: edges map to edges (hence non-edges to non-edges)."""
    if p.degree != x.n:
        return False
    im = p.images
    mapped = {(im[u], im[v]) if im[u] < im[v] else (im[v], im[u]) for u, v in x.edges}
    return mapped == set(x.edges)


# ---------------------------------------------------------------------------
# stabilizer chain (order counting and element enumeration)

def _compose(p: tuple, q: tuple) -> tuple:
    return tuple(p[i] for i in q)


def _invert(p: tuple) -> tuple:
    inv = [0] * len(p)
    for v, w in enumerate(p):
        inv[w] = v
    return tuple(inv)


class _StabilizerChain:
    """Incremental Schreier-Sims over image tuples.

    Each level holds a base point, the strong generators fixing all earlier
    base points, and a transversal of the base point's orbit.  After every
    registration the Schreier generators of the affected levels are sifted
    again, so the invariant "every Schreier generator sifts to the identity"
    holds whenever ``add`` returns.
    """

    def __init__(self, n: int):
        self.n = n
        self.id = tuple(range(n))
        self.points: list[int] = []
        self.gens: list[list[tuple]] = []
        self.trans: list[dict[int, tuple]] = []
        self.done: list[set[tuple[int, int]]] = []

    def order(self) -> int:
        o = 1
        for t in self.trans:
            o *= len(t)
        return o

    def sift(self, g: tuple, start: int = 0) -> tuple[tuple, int]:
        for i in range(start, len(self.points)):
            p = g[self.points[i]]
            t = self.trans[i].get(p)
            if t is None:
                return g, i
            g = _compose(_invert(t), g)
        return g, len(self.points)

    def add(self, g: tuple) -> bool:
        """Insert a permutation; True iff it enlarged the group."""
        h, i = self.sift(g)
        if h == self.id:
            return False
        self._register(h, i)
        return True

    def _register(self, h: tuple, i: int):
        if i == len(self.points):
            point = next(p for p in range(self.n) if h[p] != p)
            self.points.append(point)
            self.gens.append([])
            self.trans.append({point: self.id})
            self.done.append(set())
        for j in range(i + 1):
            self.gens[j].append(h)
        for j in range(i, -1, -1):
            self._close(j)

    def _close(self, j: int):
        trans = self.trans[j]
        gens = self.gens[j]
        frontier = list(trans.keys())
        while frontier:
            nxt = []
            for p in frontier:
                tp = trans[p]
                for g in gens:
                    q = g[p]
                    if q not in trans:
                        trans[q] = _compose(g, tp)
                        nxt.append(q)
            frontier = nxt
        done = self.done[j]
        for p in list(trans.keys()):
            for gi in range(len(gens)):
                if (p, gi) in done:
                    continue
                done.add((p, gi))
                g = gens[gi]
                schreier = _compose(_invert(trans[g[p]]), _compose(g, trans[p]))
                if schreier == self.id:
                    continue
                h, k = self.sift(schreier, j + 1)
                if h != self.id:
                    self._register(h, k)

    def elements(self) -> Iterator[tuple]:
        """Each group element exactly once, as a product of transversal representatives."""
        def rec(i: int) -> Iterator[tuple]:
            if i == len(self.trans):
                yield self.id
                return
            reps = [self.trans[i][p] for p in sorted(self.trans[i])]
            for rest in rec(i + 1):
                for rep in reps:
                    yield _compose(rep, rest)
        return rec(0)


@dataclass(frozen=True)
class PermutationGroup:
    degree: int
    generators: tuple[Permutation, ...]

    @cached_property
    def _chain(self) -> _StabilizerChain:
        chain = _StabilizerChain(self.degree)
        for g in self.generators:
            chain.add(g.images)
        return chain

    @cached_property
    def order(self) -> int:
        return self._chain.order()

    def elements(self) -> Iterator[Permutation]:
        return (Permutation(t) for t in self._chain.elements())

    @cached_property
    def orbit_partition(self) -> tuple[tuple[int, ...], ...]:
        parent = list(range(self.degree))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for g in self.generators:
            for v, w in enumerate(g.images):
                ra, rb = find(v), find(w)
                if ra != rb:
                    parent[rb] = ra
        groups: dict[int, list[int]] = {}
        for v in range(self.degree):
            groups.setdefault(find(v), []).append(v)
        return tuple(tuple(sorted(vs)) for _, vs in sorted(groups.items()))


def orbits(g: PermutationGroup) -> tuple[tuple[int, ...], ...]:
    """Vertex orbits, each sorted, ordered by smallest member."""
    return g.orbit_partition


# ---------------------------------------------------------------------------
# individualization-refinement search

def _refine_vertex_colors(adj: tuple[tuple[int, ...], ...], colors: list[int]) -> list[int]:
    """Stable single-vertex refinement with canonical color names."""
    n = len(colors)
    while True:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(n)]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _histogram(colors: list[int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(Counter(colors).items()))


def _first_cell(colors: list[int]) -> tuple[int, list[int]] | None:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    for c in sorted(cells):
        if len(cells[c]) > 1:
            return c, sorted(cells[c])
    return None


def _leaf_certificate(adj, colors: list[int]) -> frozenset[tuple[int, int]]:
    """Adjacency rewritten in color positions; equal certificates mean isomorphic leaves."""
    out = set()
    for v in range(len(colors)):
        cv = colors[v]
        for u in adj[v]:
            cu = colors[u]
            if cv < cu:
                out.add((cv, cu))
    return frozenset(out)


def _leaf_order(colors: list[int]) -> list[int]:
    order = [0] * len(colors)
    for v, c in enumerate(colors):
        order[c] = v
    return order


class _IRSearch:
    """Backtracking core shared by the automorphism and isomorphism searches.

    ``base_*`` describe the first root-to-leaf path of the pattern graph; the
    tree ranges over the target graph.  In automorphism mode (``collect``)
    both graphs coincide, the base path is the search's own first descent,
    and every matching leaf contributes a generator that immediately joins
    the pruning set.  In witness mode the search stops at the first match.
    """

    def __init__(self, target_adj, prune_gens: list[tuple], collect: bool):
        self.adj = target_adj
        self.n = len(target_adj)
        self.prune_gens = prune_gens
        self.collect = collect
        self.base_hists: list = []
        self.base_cells: list[int] = []
        self.base_cert: frozenset | None = None
        self.base_order: list[int] | None = None
        self.found: list[tuple] = []
        self.witness: tuple | None = None

    def run(self, establish_base: bool):
        self._search(_refine_vertex_colors(self.adj, [0] * self.n), [], 0, establish_base)

    def _candidates(self, cell: list[int], prefix: list[int]) -> Iterator[int]:
        gens = [g for g in self.prune_gens if all(g[v] == v for v in prefix)]
        explored: set[int] = set()
        for v in cell:
            if v in explored:
                continue
            yield v
            explored.add(v)
            # gens may have grown while the subtree of v was searched
            gens = [g for g in self.prune_gens if all(g[v2] == v2 for v2 in prefix)]
            if gens:
                queue = [v]
                while queue:
                    p = queue.pop()
                    for g in gens:
                        q = g[p]
                        if q not in explored:
                            explored.add(q)
                            queue.append(q)

    def _search(self, colors: list[int], prefix: list[int], depth: int, establishing: bool):
        if not self.collect and self.witness is not None:
            return
        hist = _histogram(colors)
        if establishing:
            self.base_hists.append(hist)
        elif depth >= len(self.base_hists) or hist != self.base_hists[depth]:
            return
        cell_info = _first_cell(colors)
        if cell_info is None:
            self._leaf(colors)
            return
        cell_color, cell = cell_info
        if establishing:
            self.base_cells.append(cell_color)
        elif self.base_cells[depth] != cell_color:
            return
        fresh = max(colors) + 1
        first = True
        for v in self._candidates(cell, prefix):
            child = list(colors)
            child[v] = fresh
            self._search(_refine_vertex_colors(self.adj, child), prefix + [v],
                         depth + 1, establishing and first)
            first = False
            if not self.collect and self.witness is not None:
                return

    def _leaf(self, colors: list[int]):
        order = _leaf_order(colors)
        cert = _leaf_certificate(self.adj, colors)
        if self.base_cert is None:
            self.base_cert = cert
            self.base_order = order
            return
        if cert != self.base_cert:
            return
        images = [0] * self.n
        for pos in range(self.n):
            images[self.base_order[pos]] = order[pos]
        perm = tuple(images)
        self.witness = perm
        if self.collect and perm != tuple(range(self.n)):
            self.found.append(perm)
            self.prune_gens.append(perm)


class _FirstDescent(_IRSearch):
    """Walks only the leftmost path; records the base invariants of a pattern graph."""

    def _candidates(self, cell, prefix):
        yield cell[0]


def automorphism_group(x: Graph) -> PermutationGroup:
    """Generating set found by the backtracking search, every generator re-verified."""
    search = _IRSearch(x.adjacency, [], collect=True)
    search.run(establish_base=True)
    gens = [Permutation(g) for g in search.found]
    for g in gens:
        if not is_automorphism(x, g):  # pragma: no cover
            raise RuntimeError("search produced a non-automorphism")
    return PermutationGroup(x.n, tuple(gens))


def find_isomorphism(x: Graph, y: Graph,
                     y_group: PermutationGroup | None = None) -> Permutation | None:
    """Exhaustive backtracking isomorphism search; None is a proof of non-isomorphism.

    Known automorphisms of y (computed here when not supplied) prune sibling
    branches; that is what keeps the exhaustive negative case affordable.
    """
    if x.n != y.n or x.m != y.m:
        return None
    if y_group is None:
        y_group = automorphism_group(y)
    probe = _FirstDescent(x.adjacency, [], collect=False)
    probe.run(establish_base=True)
    search = _IRSearch(y.adjacency, [g.images for g in y_group.generators], collect=False)
    search.base_hists = probe.base_hists
    search.base_cells = probe.base_cells
    search.base_cert = probe.base_cert
    search.base_order = probe.base_order
    search.run(establish_base=False)
    if search.witness is None:
        return None
    perm = Permutation(search.witness)
    mapped = {tuple(sorted((perm(u), perm(v)))) for u, v in x.edges}
    if mapped != set(y.edges):  # pragma: no cover
        raise RuntimeError("isomorphism search returned a non-isomorphism")
    return perm


# ---------------------------------------------------------------------------
# orbitals

@dataclass(frozen=True)
class OrbitalPartition:
    """Orbit partition of vertices plus the orbital partition of ordered pairs.

    The pair partition is packaged as a CoherentConfiguration; that it indeed
    satisfies the coherence axioms is asserted by tests, not assumed here.
    """

    orbits: tuple[tuple[int, ...], ...]
    configuration: CoherentConfiguration

    @property
    def orbital_count(self) -> int:
        return self.configuration.r


def orbitals(g: PermutationGroup) -> OrbitalPartition:
    """Orbit closure of the diagonal action on ordered pairs, by union-find."""
    n = g.degree
    parent = list(range(n * n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in g.generators:
        im = p.images
        for x in range(n):
            imx = im[x] * n
            xn = x * n
            for y in range(n):
                ra, rb = find(xn + y), find(imx + im[y])
                if ra != rb:
                    parent[rb] = ra
    ids = [-1] * (n * n)
    next_id = 0
    colors = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            root = find(x * n + y)
            if ids[root] < 0:
                ids[root] = next_id
                next_id += 1
            colors[x, y] = ids[root]
    return OrbitalPartition(g.orbit_partition, CoherentConfiguration(n, colors))


def is_vertex_transitive(x: Graph) -> bool:
    return len(automorphism_group(x).orbit_partition) == 1


def is_arc_transitive(x: Graph) -> bool:
    """True iff all ordered adjacent pairs lie in one orbital (vacuous without edges)."""
    if x.m == 0:
        return True
    config = orbitals(automorphism_group(x)).configuration
    classes = {config.class_of(u, v) for u, v in x.edges}
    classes |= {config.class_of(v, u) for u, v in x.edges}
    return len(classes) == 1


# ---------------------------------------------------------------------------
# commutant

def commutes_with_group(g: PermutationGroup, m) -> bool:
    """True iff M P = P M for the permutation matrix P of every generator.

    Entrywise this is M[p(x), p(y)] == M[x, y]; equivalently M is constant on
    the orbitals.  Works for integer, float and Fraction matrices alike.
    """
    arr = m if isinstance(m, np.ndarray) else np.asarray(m, dtype=object)
    if arr.shape != (g.degree, g.degree):
        raise ValueError(f"matrix shape {arr.shape} does not match degree {g.degree}")
    for p in g.generators:
        ix = np.asarray(p.images)
        if not (arr[np.ix_(ix, ix)] == arr).all():
            return False
    return True


def commutant_basis(g: PermutationGroup) -> list[np.ndarray]:
    """Characteristic matrices of the orbitals; each verified to centralize the generators."""
    config = orbitals(g).configuration
    basis = []
    for i in range(config.r):
        mat = (config.colors == i).astype(np.int64)
        if not commutes_with_group(g, mat):  # pragma: no cover
            raise RuntimeError("orbital characteristic matrix fails to commute")
        basis.append(mat)
    return basis


def commutant_dimension(g: PermutationGroup) -> int:
    """Dimension of {M : MP = PM for all generators}, by exact rational elimination.

    Unknowns are the n^2 matrix entries; each generator contributes the rows
    M[p(x), p(y)] - M[x, y] = 0.  Rows are reduced against normalized pivot
    rows in Fraction arithmetic, and the dimension is n^2 - rank.
    """
    n = g.degree
    pivot_row_for: dict[int, dict[int, Fraction]] = {}
    rank = 0
    one = Fraction(1)
    for p in g.generators:
        im = p.images
        for x in range(n):
            for y in range(n):
                a, b = x * n + y, im[x] * n + im[y]
                if a == b:
                    continue
                row = {a: one, b: -one}
                while row:
                    col = min(row)
                    pivot = pivot_row_for.get(col)
                    if pivot is None:
                        coeff = row[col]
                        pivot_row_for[col] = {c: v / coeff for c, v in row.items()}
                        rank += 1
                        break
                    factor = row.pop(col)
                    for c, v in pivot.items():
                        if c == col:
                            continue
                        new = row.get(c, 0) - factor * v
                        if new == 0:
                            row.pop(c, None)
                        else:
                            row[c] = new
    return n * n - rank


# ---------------------------------------------------------------------------
# Haar values

@dataclass(frozen=True)
class HaarValues:
    """Exact invariant-state values per orbital and per orbit.

    The value on a pair of generators indexed by two pairs in orbital R_i is
    1/|R_i| (0 across different orbitals); on a single generator indexed
    within orbit O_i it is 1/|O_i|.  When the group is small enough the
    values are re-derived by explicit averaging over all group elements.
    """

    orbital_values: dict[int, Fraction]
    orbit_values: dict[int, Fraction]
    orbital_partition: OrbitalPartition
    group_order: int
    averaging_checked: bool


def haar_values(x: Graph, group: PermutationGroup | None = None,
                enumeration_bound: int = HAAR_ENUMERATION_BOUND) -> HaarValues:
    if group is None:
        group = automorphism_group(x)
    part = orbitals(group)
    config = part.configuration
    orbital_values = {i: Fraction(1, config.class_sizes[i]) for i in range(config.r)}
    orbit_values = {i: Fraction(1, len(o)) for i, o in enumerate(part.orbits)}
    order = group.order
    checked = False
    if order <= enumeration_bound:
        _verify_haar_by_averaging(x.n, group, part, orbital_values)
        checked = True
    return HaarValues(orbital_values, orbit_values, part, order, checked)


def _verify_haar_by_averaging(n: int, group: PermutationGroup,
                              part: OrbitalPartition,
                              orbital_values: dict[int, Fraction]):
    """(1/|G|) sum over sigma of [sigma(x)=y][sigma(x')=y'] against the orbital formula."""
    counts: Counter = Counter()
    order = 0
    for sigma in group.elements():
        order += 1
        im = sigma.images
        for x in range(n):
            for x2 in range(n):
                counts[(x, x2, im[x], im[x2])] += 1
    colors = part.configuration.colors
    for x in range(n):
        for x2 in range(n):
            i = colors[x, x2]
            for y in range(n):
                for y2 in range(n):
                    got = Fraction(counts.get((x, x2, y, y2), 0), order)
                    expected = orbital_values[i] if colors[y, y2] == i else Fraction(0)
                    if got != expected:
                        raise RuntimeError(
                            f"averaging mismatch at pairs ({x},{x2})->({y},{y2}): "
                            f"{got} != {expected}")


# ---------------------------------------------------------------------------
# fixed points of the action on vertices and ordered pairs

def fixed_point_basis(g: PermutationGroup, m: int) -> list[np.ndarray]:
    """0/1 indicator vectors spanning the invariants of the m-fold action, m in {1, 2}.

    Products of three or more magic-unitary entries need not define an
    equivalence relation, so no class structure is available for m >= 3 and
    such requests are rejected.
    """
    if m == 1:
        vectors = []
        for orbit in g.orbit_partition:
            vec = np.zeros(g.degree, dtype=np.int64)
            vec[list(orbit)] = 1
            for p in g.generators:
                if not np.array_equal(vec[np.asarray(p.images)], vec):  # pragma: no cover
                    raise RuntimeError("orbit indicator is not invariant")
            vectors.append(vec)
        return vectors
    if m == 2:
        config = orbitals(g).configuration
        vectors = []
        for i in range(config.r):
            mat = (config.colors == i).astype(np.int64)
            for p in g.generators:
                ix = np.asarray(p.images)
                if not np.array_equal(mat[np.ix_(ix, ix)], mat):  # pragma: no cover
                    raise RuntimeError("orbital indicator is not invariant")
            vectors.append(mat.reshape(-1))
        return vectors
    raise ValueError(
        "fixed points are only computable for m in {1, 2}; orbit structure on "
        "m-tuples has no known well-defined analog for m >= 3")


# ---------------------------------------------------------------------------
# refinement gap between the two computable configurations

@dataclass(frozen=True)
class ConfigurationGap:
    """Comparison of the pair-refinement classes with the true orbital classes.

    The orbital partition always refines the pair-refinement partition; the
    quantum orbital partition sits between the two.  ``tight`` means the two
    computable ends coincide, pinning the quantum orbitals exactly.
    """

    wl_classes: int
    orbital_classes: int
    refines: bool
    split_classes: dict[int, tuple[int, ...]]

    @property
    def tight(self) -> bool:
        return self.refines and self.wl_classes == self.orbital_classes


def configuration_gap(x: Graph, group: PermutationGroup | None = None) -> ConfigurationGap:
    wl = wl_closure(x)
    if group is None:
        group = automorphism_group(x)
    orb = orbitals(group).configuration
    wl_of_orbital: dict[int, set[int]] = {}
    orbitals_in_wl: dict[int, set[int]] = {}
    for xx in range(x.n):
        for yy in range(x.n):
            o = int(orb.colors[xx, yy])
            w = int(wl.colors[xx, yy])
            wl_of_orbital.setdefault(o, set()).add(w)
            orbitals_in_wl.setdefault(w, set()).add(o)
    refines = all(len(ws) == 1 for ws in wl_of_orbital.values())
    split = {w: tuple(sorted(os)) for w, os in sorted(orbitals_in_wl.items()) if len(os) > 1}
    return ConfigurationGap(wl.r, orb.r, refines, split)


# ---------------------------------------------------------------------------
# text format: one generator per line as a space-separated image array

def write_generators(g: PermutationGroup) -> str:
    lines = [" ".join(str(v) for v in p.images) for p in g.generators]
    return "\n".join(lines) + ("\n" if lines else "")


def read_generators(text: str, degree: int | None = None) -> PermutationGroup:
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            images = tuple(int(p) for p in line.split())
        except ValueError:
            raise FormatError(lineno, "expected integers") from None
        if degree is None:
            degree = len(images)
        if len(images) != degree:
            raise FormatError(lineno, f"expected {degree} images")
        try:
            gens.append(Permutation(images))
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from None
    if degree is None:
        raise FormatError(1, "no generators and no degree given")
    return PermutationGroup(degree, tuple(gens))
