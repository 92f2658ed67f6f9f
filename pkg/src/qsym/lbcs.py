"""Linear binary constraint systems over GF(2) and their game graphs.

Constraints are parity equations sum_{i in S} x_i = b.  Rows are bit-packed
into Python ints; elimination picks the lowest-index pivot, so results are
deterministic.  The graph-flavoured operations turn a connected graph into
the edge-variable parity system with one odd vertex, and any system into the
graph of locally-satisfying assignments with inconsistency edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations

from .graphs import FormatError, Graph, graph, is_connected, is_planar


@dataclass(frozen=True)
class Constraint:
    support: tuple[int, ...]
    rhs: int

    def __post_init__(self):
        if not self.support:
            raise ValueError("constraint support must be non-empty")
        if list(self.support) != sorted(set(self.support)):
            raise ValueError("support must be strictly increasing")
        if self.rhs not in (0, 1):
            raise ValueError("right-hand side must be a bit")

    @property
    def mask(self) -> int:
        m = 0
        for i in self.support:
            m |= 1 << i
        return m


@dataclass(frozen=True)
class Lbcs:
    n_vars: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        for c in self.constraints:
            if c.support[-1] >= self.n_vars:
                raise ValueError(f"variable {c.support[-1]} out of range")

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)


def make_lbcs(n_vars: int, rows) -> Lbcs:
    """Build a system from (support, rhs) pairs."""
    return Lbcs(n_vars, tuple(Constraint(tuple(sorted(set(s))), b) for s, b in rows))


def magic_square_system() -> Lbcs:
    """3x3 grid of variables; row sums 0, column sums 0 except the last, which is 1."""
    rows = [({0, 1, 2}, 0), ({3, 4, 5}, 0), ({6, 7, 8}, 0),
            ({0, 3, 6}, 0), ({1, 4, 7}, 0), ({2, 5, 8}, 1)]
    return make_lbcs(9, rows)


# ---------------------------------------------------------------------------
# GF(2) solving

@dataclass(frozen=True)
class SatResult:
    """Outcome of elimination: an assignment, or the rows that refute one.

    ``inconsistent_rows`` indexes constraints whose GF(2) sum is the equation
    0 = 1; it is the explicit inconsistency proof.
    """

    assignment: tuple[int, ...] | None
    inconsistent_rows: tuple[int, ...] | None

    @property
    def satisfiable(self) -> bool:
        return self.assignment is not None


def _eliminate(f: Lbcs) -> tuple[list[tuple[int, int, int]], list[tuple[int, int]]]:
    """Row-reduce (mask, rhs, history) rows; lowest set bit is the pivot column.

    Returns the reduced pivot rows and any zero-mask rows (rhs, history),
    where history is a bitmask over original constraint indices.
    """
    rows = [(c.mask, c.rhs, 1 << i) for i, c in enumerate(f.constraints)]
    pivots: dict[int, tuple[int, int, int]] = {}
    zeros: list[tuple[int, int]] = []
    for mask, rhs, hist in rows:
        while mask:
            col = (mask & -mask).bit_length() - 1
            if col not in pivots:
                pivots[col] = (mask, rhs, hist)
                break
            pmask, prhs, phist = pivots[col]
            mask ^= pmask
            rhs ^= prhs
            hist ^= phist
        else:
            zeros.append((rhs, hist))
    return [pivots[c] for c in sorted(pivots)], zeros


def classical_solve(f: Lbcs) -> SatResult:
    """Gaussian elimination over GF(2); assignment or inconsistency proof."""
    pivot_rows, zeros = _eliminate(f)
    for rhs, hist in zeros:
        if rhs == 1:
            witness = tuple(i for i in range(f.n_constraints) if (hist >> i) & 1)
            return SatResult(None, witness)
    assignment = [0] * f.n_vars
    for mask, rhs, _ in reversed(pivot_rows):
        col = (mask & -mask).bit_length() - 1
        acc = rhs
        rest = mask & ~(1 << col)
        while rest:
            j = (rest & -rest).bit_length() - 1
            acc ^= assignment[j]
            rest &= rest - 1
        assignment[col] = acc
    return SatResult(tuple(assignment), None)


def classical_satisfiable(f: Lbcs) -> tuple[int, ...] | None:
    """A satisfying assignment, or None when the system is inconsistent."""
    return classical_solve(f).assignment


def homogenize(f: Lbcs) -> Lbcs:
    """Same supports, every right-hand side set to 0."""
    return Lbcs(f.n_vars, tuple(Constraint(c.support, 0) for c in f.constraints))


@dataclass(frozen=True)
class SolutionSpace:
    """Kernel basis of the homogeneous system plus one particular solution."""

    kernel_basis: tuple[tuple[int, ...], ...]
    particular: tuple[int, ...] | None
    rank: int

    @property
    def dimension(self) -> int:
        return len(self.kernel_basis)


def solution_space(f: Lbcs) -> SolutionSpace:
    pivot_rows, _ = _eliminate(homogenize(f))
    pivot_cols = [(mask & -mask).bit_length() - 1 for mask, _, _ in pivot_rows]
    free_cols = [j for j in range(f.n_vars) if j not in set(pivot_cols)]
    basis = []
    for free in free_cols:
        vec = [0] * f.n_vars
        vec[free] = 1
        for mask, _, _ in reversed(pivot_rows):
            col = (mask & -mask).bit_length() - 1
            acc = 0
            rest = mask & ~(1 << col)
            while rest:
                j = (rest & -rest).bit_length() - 1
                acc ^= vec[j]
                rest &= rest - 1
            vec[col] = acc
        basis.append(tuple(vec))
    return SolutionSpace(tuple(basis), classical_satisfiable(f), len(pivot_rows))


def rhs_parity(f: Lbcs) -> int:
    """XOR of all right-hand sides."""
    p = 0
    for c in f.constraints:
        p ^= c.rhs
    return p


# ---------------------------------------------------------------------------
# the game graph of a system

def _satisfying_local_assignments(c: Constraint) -> list[tuple[int, ...]]:
    """Bit patterns over the sorted support with the required parity, in
    lexicographic order of the pattern (leftmost support variable first)."""
    k = len(c.support)
    out = []
    for bits in range(1 << k):
        pattern = tuple((bits >> (k - 1 - i)) & 1 for i in range(k))
        if sum(pattern) % 2 == c.rhs:
            out.append(pattern)
    return out


def game_graph(f: Lbcs, include_clique_edges: bool = True) -> Graph:
    """Vertices are (constraint, local satisfying assignment) pairs; edges join
    inconsistent vertices, i.e. pairs disagreeing on a shared variable.

    Two distinct assignments for one constraint always disagree somewhere, so
    with ``include_clique_edges`` each constraint's vertex set is a clique;
    switching it off drops exactly those edges and keeps the cross-constraint
    inconsistency edges.  Vertex order: constraints in input order, local
    assignments in lexicographic order of their bit patterns.
    """
    vertices: list[tuple[int, tuple[int, ...]]] = []
    for ell, c in enumerate(f.constraints):
        vertices.extend((ell, pattern) for pattern in _satisfying_local_assignments(c))
    index_of = {v: i for i, v in enumerate(vertices)}
    var_pos = [{v: i for i, v in enumerate(c.support)} for c in f.constraints]
    edges = []
    for (ell, pat), (k, pat2) in combinations(vertices, 2):
        if ell == k:
            if include_clique_edges:
                edges.append((index_of[(ell, pat)], index_of[(k, pat2)]))
            continue
        shared = set(f.constraints[ell].support) & set(f.constraints[k].support)
        if any(pat[var_pos[ell][v]] != pat2[var_pos[k][v]] for v in shared):
            edges.append((index_of[(ell, pat)], index_of[(k, pat2)]))
    return graph(len(vertices), edges, labels=vertices)


# ---------------------------------------------------------------------------
# graphs as parity systems

def arkhipov_lbcs(z: Graph, marked: int) -> Lbcs:
    """Edge variables, one parity constraint per vertex, odd only at the mark.

    Variable i is the i-th edge of z in sorted order; the constraint of a
    vertex sums its incident edge variables, with right-hand side 1 exactly
    at the marked vertex.
    """
    if not is_connected(z):
        raise ValueError("construction requires a connected graph")
    if not (0 <= marked < z.n):
        raise ValueError("marked vertex out of range")
    if z.degree(marked) == 0:
        raise ValueError("marked vertex must have at least one incident edge")
    edge_index = {e: i for i, e in enumerate(z.edge_list)}
    rows = []
    for v in range(z.n):
        support = {edge_index[e] for e in z.incident_edges(v)}
        rows.append((support, 1 if v == marked else 0))
    return make_lbcs(z.m, rows)


class QuantumVerdict(Enum):
    QUANTUM_SAT = "quantum-sat"
    QUANTUM_UNSAT = "quantum-unsat"


@dataclass(frozen=True)
class QuantumSatReport:
    verdict: QuantumVerdict
    planar: bool
    note: str

    @property
    def satisfiable(self) -> bool:
        return self.verdict is QuantumVerdict.QUANTUM_SAT


def quantum_satisfiable_verdict(z: Graph) -> QuantumSatReport:
    """Operator solvability of the single-mark parity system of a connected graph.

    Equivalent to non-planarity; positive verdicts come with a witness in
    even dimension at most eight, though no witness is synthesized here.
    """
    if not is_connected(z):
        raise ValueError("verdict requires a connected graph")
    planar = is_planar(z)
    if planar:
        return QuantumSatReport(QuantumVerdict.QUANTUM_UNSAT, True,
                                "planar: no operator solution in any dimension")
    return QuantumSatReport(QuantumVerdict.QUANTUM_SAT, False,
                            "non-planar: an operator solution exists in even dimension at most 8")


# ---------------------------------------------------------------------------
# text format: line 1 "n m"; then m lines "b k i1 ... ik"; '#' comments

def write_lbcs(f: Lbcs) -> str:
    lines = [f"{f.n_vars} {f.n_constraints}"]
    for c in f.constraints:
        lines.append(f"{c.rhs} {len(c.support)} " + " ".join(str(i) for i in c.support))
    return "\n".join(lines) + "\n"


def read_lbcs(text: str) -> Lbcs:
    header: tuple[int, int] | None = None
    rows: list[tuple[set[int], int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise FormatError(lineno, "expected integers") from None
        if header is None:
            if len(vals) != 2 or vals[0] < 1 or vals[1] < 0:
                raise FormatError(lineno, "expected header 'n m' with n >= 1")
            header = (vals[0], vals[1])
            continue
        if len(vals) < 2:
            raise FormatError(lineno, "expected 'b k i1 ... ik'")
        b, k, support = vals[0], vals[1], vals[2:]
        if b not in (0, 1):
            raise FormatError(lineno, "rhs must be 0 or 1")
        if k != len(support) or k < 1:
            raise FormatError(lineno, f"support size {k} does not match {len(support)} indices")
        if support != sorted(set(support)):
            raise FormatError(lineno, "support indices must be strictly increasing")
        if any(i < 0 or i >= header[0] for i in support):
            raise FormatError(lineno, "variable index out of range")
        rows.append((set(support), b))
    if header is None:
        raise FormatError(1, "empty input: missing header 'n m'")
    if len(rows) != header[1]:
        raise FormatError(1, f"header announced {header[1]} constraints, found {len(rows)}")
    return make_lbcs(header[0], rows)
