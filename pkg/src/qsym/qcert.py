"""Numeric verification of finite-dimensional quantum certificates.

A magic unitary candidate is an n-by-n array of d-by-d complex blocks meant
to be projections with every block row and block column summing to the
identity.  An operator solution candidate assigns a d-by-d self-adjoint
involution to every variable of a binary constraint system, commuting within
each constraint, with the constraint products equal to plus or minus the
identity according to the right-hand sides.

All residuals are max-absolute-entry; checks never construct certificates
(the permutation embedding and the two-qubit grid below are the only
builders, and both re-verify themselves).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graphs import FormatError, Graph
from .lbcs import Lbcs
from .symmetry import Permutation

DEFAULT_TOL = 1e-9

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _check_finite(arr: np.ndarray, what: str):
    if not np.isfinite(arr).all():
        raise ValueError(f"{what} contains non-finite entries")


@dataclass(frozen=True)
class MagicUnitaryCandidate:
    """n x n array of d x d complex blocks, stored as an (n, n, d, d) array."""

    blocks: np.ndarray

    def __post_init__(self):
        b = self.blocks
        if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[2] != b.shape[3]:
            raise ValueError("blocks must form an (n, n, d, d) array")
        if b.shape[0] < 1 or b.shape[2] < 1:
            raise ValueError("dimensions must be positive")
        _check_finite(b, "magic unitary candidate")

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def d(self) -> int:
        return self.blocks.shape[2]

    def flat_matrix(self) -> np.ndarray:
        """The candidate as one (n*d) x (n*d) matrix of scalars."""
        return self.blocks.transpose(0, 2, 1, 3).reshape(self.n * self.d, self.n * self.d)


@dataclass(frozen=True)
class OperatorSolutionCandidate:
    """One d x d complex matrix per variable, stored as a (k, d, d) array."""

    operators: np.ndarray

    def __post_init__(self):
        o = self.operators
        if o.ndim != 3 or o.shape[1] != o.shape[2]:
            raise ValueError("operators must form a (k, d, d) array")
        if o.shape[0] < 1 or o.shape[1] < 1:
            raise ValueError("dimensions must be positive")
        _check_finite(o, "operator solution candidate")

    @property
    def n_vars(self) -> int:
        return self.operators.shape[0]

    @property
    def d(self) -> int:
        return self.operators.shape[1]


def _max_abs(arr: np.ndarray) -> float:
    return float(np.max(np.abs(arr))) if arr.size else 0.0


# ---------------------------------------------------------------------------
# magic unitary checks

@dataclass(frozen=True)
class MagicUnitaryReport:
    hermitian: float
    idempotent: float
    row_sum: float
    col_sum: float
    unitarity: float
    tol: float

    @property
    def passed(self) -> bool:
        """Projection and sum conditions within tolerance; unitarity is the
        implied consequence and is reported, not gated."""
        return max(self.hermitian, self.idempotent, self.row_sum, self.col_sum) <= self.tol

    def residuals(self) -> dict[str, float]:
        return {"hermitian": self.hermitian, "idempotent": self.idempotent,
                "row_sum": self.row_sum, "col_sum": self.col_sum,
                "unitarity": self.unitarity}


def check_magic_unitary(u: MagicUnitaryCandidate, tol: float = DEFAULT_TOL) -> MagicUnitaryReport:
    b = u.blocks
    eye = np.eye(u.d)
    herm = _max_abs(b - b.conj().transpose(0, 1, 3, 2))
    idem = _max_abs(np.einsum("xyab,xybc->xyac", b, b) - b)
    row = _max_abs(b.sum(axis=1) - eye)
    col = _max_abs(b.sum(axis=0) - eye)
    flat = u.flat_matrix()
    eye_full = np.eye(u.n * u.d)
    unit = max(_max_abs(flat @ flat.conj().T - eye_full),
               _max_abs(flat.conj().T @ flat - eye_full))
    return MagicUnitaryReport(herm, idem, row, col, unit, tol)


@dataclass(frozen=True)
class QuantumIsomorphismReport:
    commutation: float
    orthogonality: float
    tol: float
    inconsistent: bool

    @property
    def passed(self) -> bool:
        return self.commutation <= self.tol and self.orthogonality <= self.tol


def check_quantum_isomorphism(x: Graph, y: Graph, u: MagicUnitaryCandidate,
                              tol: float = DEFAULT_TOL) -> QuantumIsomorphismReport:
    """Verify AU = UB and the orthogonality relations independently.

    The two formulations are equivalent for exact magic unitaries; if one
    residual passes while the other exceeds ten times the tolerance, the
    report flags an internal inconsistency.
    """
    if x.n != y.n:
        raise ValueError("graphs must have the same number of vertices")
    if u.n != x.n:
        raise ValueError(f"candidate is {u.n}x{u.n} but graphs have {x.n} vertices")
    mu = check_magic_unitary(u, tol)
    if not mu.passed:
        raise ValueError(f"candidate fails the magic unitary check: {mu.residuals()}")
    a = x.adjacency_matrix().astype(np.complex128)
    b_mat = y.adjacency_matrix().astype(np.complex128)
    au = np.einsum("ij,jkab->ikab", a, u.blocks)
    ub = np.einsum("ijab,jk->ikab", u.blocks, b_mat)
    commutation = _max_abs(au - ub)
    orth = 0.0
    blocks = u.blocks
    for x1 in range(x.n):
        for x2 in range(x.n):
            rel_x = x.rel(x1, x2)
            for y1 in range(y.n):
                for y2 in range(y.n):
                    if rel_x is not y.rel(y1, y2):
                        orth = max(orth, _max_abs(blocks[x1, y1] @ blocks[x2, y2]))
    inconsistent = (commutation <= tol) != (orth <= tol) and abs(commutation - orth) > 10 * tol
    return QuantumIsomorphismReport(commutation, orth, tol, inconsistent)


# ---------------------------------------------------------------------------
# operator solution checks

@dataclass(frozen=True)
class OperatorSolutionReport:
    self_adjoint: float
    involution: float
    commutation: float
    product: float
    per_constraint_product: tuple[float, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.self_adjoint, self.involution, self.commutation, self.product) <= self.tol


def check_operator_solution(f: Lbcs, s: OperatorSolutionCandidate,
                            tol: float = DEFAULT_TOL) -> OperatorSolutionReport:
    """Residuals for the multiplicative reading of the constraint system.

    Per-constraint products are evaluated in ascending variable order; the
    commutation residual is checked first, making the order immaterial up to
    terms of the same size.
    """
    if s.n_vars != f.n_vars:
        raise ValueError(f"candidate assigns {s.n_vars} operators to {f.n_vars} variables")
    ops = s.operators
    eye = np.eye(s.d)
    adj = _max_abs(ops - ops.conj().transpose(0, 2, 1))
    inv = _max_abs(np.einsum("iab,ibc->iac", ops, ops) - eye)
    comm = 0.0
    per_products = []
    for c in f.constraints:
        for i_pos, i in enumerate(c.support):
            for j in c.support[i_pos + 1:]:
                comm = max(comm, _max_abs(ops[i] @ ops[j] - ops[j] @ ops[i]))
        prod = eye.astype(np.complex128)
        for i in c.support:
            prod = prod @ ops[i]
        per_products.append(_max_abs(prod - ((-1) ** c.rhs) * eye))
    return OperatorSolutionReport(adj, inv, comm, max(per_products, default=0.0),
                                  tuple(per_products), tol)


# ---------------------------------------------------------------------------
# builders (the only certificate constructors)

def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def mermin_peres_solution() -> OperatorSolutionCandidate:
    """The two-qubit Pauli grid aligned with the magic-square variable order.

    Variables 0..8 in the 3x3 grid read row by row; each row multiplies to
    +identity and each column to +identity except the last, which gives
    -identity.  The builder re-checks itself exactly and refuses to return a
    broken solution.
    """
    eye = np.eye(2, dtype=np.complex128)
    ops = np.stack([
        _kron(PAULI_X, eye),      # x1
        _kron(eye, PAULI_X),      # x2
        _kron(PAULI_X, PAULI_X),  # x3
        _kron(eye, PAULI_Z),      # x4
        _kron(PAULI_Z, eye),      # x5
        _kron(PAULI_Z, PAULI_Z),  # x6
        _kron(PAULI_X, PAULI_Z),  # x7
        _kron(PAULI_Z, PAULI_X),  # x8
        _kron(PAULI_Y, PAULI_Y),  # x9
    ])
    candidate = OperatorSolutionCandidate(ops)
    from .lbcs import magic_square_system

    report = check_operator_solution(magic_square_system(), candidate, tol=0.0)
    if not report.passed:  # pragma: no cover
        raise RuntimeError(f"built-in grid solution failed its self-check: {report}")
    return candidate


def classical_strategy_as_certificate(sigma: Permutation, x: Graph, y: Graph) -> MagicUnitaryCandidate:
    """Embed a graph isomorphism as a 1x1-block magic unitary; exact by construction."""
    if sigma.degree != x.n or x.n != y.n:
        raise ValueError("permutation degree must match both vertex counts")
    mapped = {tuple(sorted((sigma(u), sigma(v)))) for u, v in x.edges}
    if mapped != set(y.edges):
        raise ValueError("the permutation is not an isomorphism between the graphs")
    blocks = np.zeros((x.n, x.n, 1, 1), dtype=np.complex128)
    for v in range(x.n):
        blocks[v, sigma(v), 0, 0] = 1.0
    return MagicUnitaryCandidate(blocks)


def permutation_candidate(sigma: Permutation) -> MagicUnitaryCandidate:
    """1x1-block candidate of an arbitrary permutation (no isomorphism requirement)."""
    n = sigma.degree
    blocks = np.zeros((n, n, 1, 1), dtype=np.complex128)
    for v in range(n):
        blocks[v, sigma(v), 0, 0] = 1.0
    return MagicUnitaryCandidate(blocks)


def two_projector_magic_unitary(theta: float = math.pi / 4) -> MagicUnitaryCandidate:
    """Block-diagonal 4x4 candidate from two free rank-one projectors.

    The first 2x2 block pair uses a = diag(1, 0), the second uses the
    projector onto (cos theta, sin theta); rows and columns sum to the
    identity by construction.
    """
    a = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    c, s = math.cos(theta), math.sin(theta)
    b = np.array([[c * c, c * s], [c * s, s * s]], dtype=np.complex128)
    eye = np.eye(2, dtype=np.complex128)
    zero = np.zeros((2, 2), dtype=np.complex128)
    rows = [
        [a, eye - a, zero, zero],
        [eye - a, a, zero, zero],
        [zero, zero, b, eye - b],
        [zero, zero, eye - b, b],
    ]
    return MagicUnitaryCandidate(np.array(rows))


# ---------------------------------------------------------------------------
# JSON certificate files

def _matrix_to_pairs(m: np.ndarray) -> list[list[list[float]]]:
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _pairs_to_matrix(rows, d: int, what: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != d:
        raise FormatError(1, f"{what}: expected {d} rows")
    out = np.zeros((d, d), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != d:
            raise FormatError(1, f"{what}: expected {d} entries per row")
        for j, pair in enumerate(row):
            if not (isinstance(pair, list) and len(pair) == 2
                    and all(isinstance(v, (int, float)) for v in pair)):
                raise FormatError(1, f"{what}: entries must be [re, im] pairs")
            out[i, j] = complex(pair[0], pair[1])
    return out


def write_magic_unitary(u: MagicUnitaryCandidate) -> str:
    obj = {
        "n": u.n,
        "d": u.d,
        "blocks": [[_matrix_to_pairs(u.blocks[x, y]) for y in range(u.n)]
                   for x in range(u.n)],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def read_magic_unitary(text: str) -> MagicUnitaryCandidate:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.lineno, f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict) or not {"n", "d", "blocks"} <= set(obj):
        raise FormatError(1, "expected an object with fields n, d, blocks")
    n, d = obj["n"], obj["d"]
    if not (isinstance(n, int) and isinstance(d, int) and n >= 1 and d >= 1):
        raise FormatError(1, "n and d must be positive integers")
    if not isinstance(obj["blocks"], list) or len(obj["blocks"]) != n:
        raise FormatError(1, f"expected {n} block rows")
    blocks = np.zeros((n, n, d, d), dtype=np.complex128)
    for x, row in enumerate(obj["blocks"]):
        if not isinstance(row, list) or len(row) != n:
            raise FormatError(1, f"expected {n} blocks in row {x}")
        for y, entry in enumerate(row):
            blocks[x, y] = _pairs_to_matrix(entry, d, f"block ({x},{y})")
    return MagicUnitaryCandidate(blocks)


def write_operator_solution(s: OperatorSolutionCandidate) -> str:
    obj = {
        "n_vars": s.n_vars,
        "d": s.d,
        "vars": [_matrix_to_pairs(s.operators[i]) for i in range(s.n_vars)],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def read_operator_solution(text: str) -> OperatorSolutionCandidate:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.lineno, f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict) or not {"n_vars", "d", "vars"} <= set(obj):
        raise FormatError(1, "expected an object with fields n_vars, d, vars")
    k, d = obj["n_vars"], obj["d"]
    if not (isinstance(k, int) and isinstance(d, int) and k >= 1 and d >= 1):
        raise FormatError(1, "n_vars and d must be positive integers")
    if not isinstance(obj["vars"], list) or len(obj["vars"]) != k:
        raise FormatError(1, f"expected {k} operators")
    ops = np.zeros((k, d, d), dtype=np.complex128)
    for i, entry in enumerate(obj["vars"]):
        ops[i] = _pairs_to_matrix(entry, d, f"operator {i}")
    return OperatorSolutionCandidate(ops)
