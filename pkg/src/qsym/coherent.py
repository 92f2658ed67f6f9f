"""Coherent configurations via pair refinement on ordered vertex pairs.

The refinement colors all n^2 ordered pairs, starting from the partition
{diagonal, edge, non-edge}, and repeatedly replaces each pair's color with
the multiset, over intermediate vertices z, of the color pairs
(color(x,z), color(z,y)).  The stable partition is the coarsest coherent
configuration whose algebra contains the adjacency matrix.

Color names are canonical: at every round the (old color, signature) keys
are sorted and renamed to consecutive integers.  Running two graphs jointly
through the same renaming makes equivalence testing a per-round histogram
comparison, and the surviving class ids line up across the two graphs.
Signatures are compared in full; no hashing is involved, so there are no
collisions to check for.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .graphs import FormatError, Graph

# Cap on the entry count of one signature block; keeps the O(n^3) round
# tensors inside a fixed memory budget by chunking over rows.
_CHUNK_ENTRIES = 4_000_000


def _initial_colors(x: Graph) -> np.ndarray:
    """0 = diagonal, 1 = edge, 2 = distinct non-adjacent (shared across graphs)."""
    c = np.full((x.n, x.n), 2, dtype=np.int64)
    a = x.adjacency_matrix()
    c[a == 1] = 1
    np.fill_diagonal(c, 0)
    return c


def _pair_signatures(colors: np.ndarray, r: int) -> np.ndarray:
    """Row per ordered pair (x,y): [color(x,y), sorted multiset of color(x,z)*r + color(z,y)]."""
    n = colors.shape[0]
    keys = np.empty((n * n, n + 1), dtype=np.int64)
    ct = np.ascontiguousarray(colors.T)
    chunk = max(1, _CHUNK_ENTRIES // max(n * n, 1))
    for x0 in range(0, n, chunk):
        x1 = min(n, x0 + chunk)
        block = colors[x0:x1, None, :] * r + ct[None, :, :]
        block.sort(axis=2)
        joined = np.concatenate([colors[x0:x1, :, None], block], axis=2)
        keys[x0 * n:x1 * n, :] = joined.reshape((x1 - x0) * n, n + 1)
    return keys


def _compress_joint(mats: list[np.ndarray]) -> list[np.ndarray]:
    stacked = np.concatenate([m.reshape(-1, 1) for m in mats])
    _, inverse = np.unique(stacked, return_inverse=True)
    out = []
    pos = 0
    for m in mats:
        k = m.size
        out.append(inverse[pos:pos + k].reshape(m.shape).astype(np.int64))
        pos += k
    return out


def _refine_joint(mats: list[np.ndarray]) -> tuple[list[np.ndarray], list[list[np.ndarray]]]:
    """Refine all matrices to stability under one shared canonical naming.

    Returns the stable matrices and, per round (including the initial one),
    the list of per-matrix color histograms.
    """
    mats = _compress_joint(mats)
    history: list[list[np.ndarray]] = []

    def snapshot(ms: list[np.ndarray]):
        r = int(max(m.max() for m in ms)) + 1
        history.append([np.bincount(m.reshape(-1), minlength=r) for m in ms])

    snapshot(mats)
    limit = max(m.shape[0] for m in mats) ** 2 + 2
    for _ in range(limit):
        r = int(max(m.max() for m in mats)) + 1
        keys = [_pair_signatures(m, r) for m in mats]
        _, inverse = np.unique(np.concatenate(keys), axis=0, return_inverse=True)
        new_mats = []
        pos = 0
        for m in mats:
            k = m.size
            new_mats.append(inverse[pos:pos + k].reshape(m.shape).astype(np.int64))
            pos += k
        if all(np.array_equal(a, b) for a, b in zip(new_mats, mats)):
            return mats, history
        mats = new_mats
        snapshot(mats)
    raise RuntimeError("pair refinement failed to stabilize")  # pragma: no cover


@dataclass(frozen=True)
class CoherentConfiguration:
    """A stable partition of ordered pairs with its intersection numbers.

    ``colors`` is an n-by-n matrix of class ids 0..r-1.  Whether the partition
    actually satisfies the coherence axioms is the business of
    :func:`verify_configuration`; instances built by :func:`wl_closure` always
    do.
    """

    n: int
    colors: np.ndarray

    def __post_init__(self):
        self.colors.setflags(write=False)

    @cached_property
    def r(self) -> int:
        return int(self.colors.max()) + 1

    @cached_property
    def class_sizes(self) -> tuple[int, ...]:
        return tuple(int(s) for s in np.bincount(self.colors.reshape(-1), minlength=self.r))

    @cached_property
    def diagonal_classes(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.unique(np.diagonal(self.colors)))

    @cached_property
    def converse(self) -> dict[int, int]:
        """Class id of the transposed pair, from one representative per class."""
        conv = {}
        flat = self.colors.reshape(-1)
        first = np.full(self.r, -1, dtype=np.int64)
        rev = np.argsort(flat, kind="stable")
        sizes = np.bincount(flat, minlength=self.r)
        pos = 0
        for i in range(self.r):
            first[i] = rev[pos]
            pos += sizes[i]
        for i in range(self.r):
            x, y = divmod(int(first[i]), self.n)
            conv[i] = int(self.colors[y, x])
        return conv

    @cached_property
    def intersection_numbers(self) -> dict[tuple[int, int, int], int]:
        """Sparse p_ij^k from one witness pair per class k."""
        out: dict[tuple[int, int, int], int] = {}
        flat = self.colors.reshape(-1)
        rev = np.argsort(flat, kind="stable")
        sizes = np.bincount(flat, minlength=self.r)
        pos = 0
        for k in range(self.r):
            x, z = divmod(int(rev[pos]), self.n)
            pos += int(sizes[k])
            pairs = Counter(zip(self.colors[x, :].tolist(), self.colors[:, z].tolist()))
            for (i, j), p in pairs.items():
                out[(i, j, k)] = p
        return out

    def class_of(self, x: int, y: int) -> int:
        return int(self.colors[x, y])

    def class_pairs(self, i: int) -> list[tuple[int, int]]:
        xs, ys = np.nonzero(self.colors == i)
        return list(zip(xs.tolist(), ys.tolist()))


def wl_closure(x: Graph) -> CoherentConfiguration:
    """Coarsest coherent configuration whose algebra contains the adjacency matrix."""
    stable, _ = _refine_joint([_initial_colors(x)])
    return CoherentConfiguration(x.n, stable[0])


def is_discrete(c: CoherentConfiguration) -> bool:
    """True iff every ordered pair is its own class."""
    return c.r == c.n * c.n


# ---------------------------------------------------------------------------
# axiom verification

@dataclass(frozen=True)
class ConfigCheck:
    ok: bool
    failure: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_configuration(c: CoherentConfiguration) -> ConfigCheck:
    """Exhaustively re-check the three coherence axioms.

    Condition 3 is checked at every witness pair: the signature row of a pair
    re-derives its intersection counts independently of the stored table, and
    all witnesses of a class must agree.
    """
    flat = c.colors.reshape(-1)
    present = np.bincount(flat, minlength=c.r)
    if c.colors.shape != (c.n, c.n):
        return ConfigCheck(False, "color matrix shape mismatch")
    if flat.min() < 0 or (present == 0).any():
        return ConfigCheck(False, "class ids are not consecutive 0..r-1")

    diag = np.diagonal(c.colors)
    diag_classes = set(int(i) for i in np.unique(diag))
    diag_counts = Counter(int(i) for i in diag)
    for i in diag_classes:
        if diag_counts[i] != c.class_sizes[i]:
            return ConfigCheck(False, f"condition 1: class {i} mixes diagonal and off-diagonal pairs")

    trans_ids = c.colors.T
    for i in range(c.r):
        vals = np.unique(trans_ids[c.colors == i])
        if len(vals) != 1:
            return ConfigCheck(False, f"condition 2: converse of class {i} is not a single class")
    for i, ip in c.converse.items():
        if c.converse[ip] != i:
            return ConfigCheck(False, f"condition 2: converse map not an involution at class {i}")

    sig = _pair_signatures(c.colors, c.r)
    order = np.argsort(flat, kind="stable")
    sizes = np.bincount(flat, minlength=c.r)
    pos = 0
    for k in range(c.r):
        rows = sig[order[pos:pos + int(sizes[k])]]
        pos += int(sizes[k])
        if (rows != rows[0]).any():
            bad = int(np.nonzero((rows != rows[0]).any(axis=1))[0][0])
            x, z = divmod(int(order[pos - int(sizes[k]) + bad]), c.n)
            counts = Counter(zip(c.colors[x, :].tolist(), c.colors[:, z].tolist()))
            for (i, j), p in counts.items():
                if c.intersection_numbers.get((i, j, k)) != p:
                    return ConfigCheck(
                        False,
                        f"condition 3: p[{i},{j}]^{k} is {c.intersection_numbers.get((i, j, k), 0)} "
                        f"at the stored witness but {p} at pair ({x},{z})")
            return ConfigCheck(False, f"condition 3: witness ({x},{z}) of class {k} disagrees")
    return ConfigCheck(True)


def in_coherent_algebra(c: CoherentConfiguration, m) -> bool:
    """True iff the matrix is constant on every class of the configuration."""
    arr = np.asarray(m, dtype=object) if not isinstance(m, np.ndarray) else m
    if arr.shape != (c.n, c.n):
        raise ValueError(f"matrix shape {arr.shape} does not match configuration on {c.n} vertices")
    flat_m = arr.reshape(-1)
    flat_c = c.colors.reshape(-1)
    order = np.argsort(flat_c, kind="stable")
    pos = 0
    for k in range(c.r):
        size = c.class_sizes[k]
        vals = flat_m[order[pos:pos + size]]
        pos += size
        if any(v != vals[0] for v in vals[1:]):
            return False
    return True


# ---------------------------------------------------------------------------
# equivalence of two graphs

@dataclass(frozen=True)
class EquivalenceCertificate:
    """Class bijection between two coherent configurations.

    The bijection preserves all intersection numbers and maps diagonal
    classes to diagonal classes; ``maps_edge_classes`` records that the union
    of edge classes on one side corresponds exactly to the edge set on the
    other, i.e. the induced algebra isomorphism carries one adjacency matrix
    to the other.
    """

    n: int
    r: int
    class_map: dict[int, int]
    maps_edge_classes: bool

    def inverse(self) -> dict[int, int]:
        return {v: k for k, v in self.class_map.items()}


@dataclass(frozen=True)
class WlComparison:
    equivalent: bool
    rounds: int
    distinguished_round: int | None
    certificate: EquivalenceCertificate | None
    config_x: CoherentConfiguration
    config_y: CoherentConfiguration


def wl_comparison(x: Graph, y: Graph) -> WlComparison:
    """Joint refinement of two graphs under one shared color naming.

    The graphs are equivalent exactly when every round's color histograms
    agree; the identity map on the shared class ids is then the bijection,
    and its intersection-number equality is checked exhaustively before a
    certificate is issued.
    """
    if x.n != y.n:
        cx, cy = wl_closure(x), wl_closure(y)
        return WlComparison(False, 0, 0, None, cx, cy)
    stable, history = _refine_joint([_initial_colors(x), _initial_colors(y)])
    cx = CoherentConfiguration(x.n, stable[0])
    cy = CoherentConfiguration(y.n, stable[1])
    for rnd, (hx, hy) in enumerate(history):
        if not np.array_equal(hx, hy):
            return WlComparison(False, len(history) - 1, rnd, None, cx, cy)

    if cx.intersection_numbers != cy.intersection_numbers:  # pragma: no cover
        raise RuntimeError("histogram-equal refinement produced unequal intersection numbers")
    edge_x = {cx.class_of(u, v) for u, v in x.edges} | {cx.class_of(v, u) for u, v in x.edges}
    edge_y = {cy.class_of(u, v) for u, v in y.edges} | {cy.class_of(v, u) for u, v in y.edges}
    maps_edges = edge_x == edge_y
    cert = EquivalenceCertificate(x.n, cx.r, {i: i for i in range(cx.r)}, maps_edges)
    return WlComparison(True, len(history) - 1, None, cert, cx, cy)


def wl_equivalent(x: Graph, y: Graph) -> EquivalenceCertificate | None:
    """Certificate that the coherent algebras are isomorphic with A mapped to B, or None."""
    return wl_comparison(x, y).certificate


# ---------------------------------------------------------------------------
# cospectrality

@dataclass(frozen=True)
class CospectralReport:
    adjacency: bool
    laplacian: bool
    signless_laplacian: bool
    max_deltas: dict[str, float]

    @property
    def all_agree(self) -> bool:
        return self.adjacency and self.laplacian and self.signless_laplacian


def _spectrum(m: np.ndarray) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(m.astype(np.float64)))


def cospectral_report(x: Graph, y: Graph, rel_tol: float = 1e-8) -> CospectralReport:
    """Compare sorted spectra of adjacency, Laplacian and signless Laplacian.

    Two spectra agree when their l-infinity distance is at most
    rel_tol * max(1, spectral radius).
    """
    if x.n != y.n:
        raise ValueError("cospectrality needs equal vertex counts")
    ax, ay = x.adjacency_matrix(), y.adjacency_matrix()
    dx, dy = np.diag(ax.sum(axis=1)), np.diag(ay.sum(axis=1))
    results = {}
    deltas = {}
    for name, mx, my in (
        ("adjacency", ax, ay),
        ("laplacian", dx - ax, dy - ay),
        ("signless_laplacian", dx + ax, dy + ay),
    ):
        sx, sy = _spectrum(mx), _spectrum(my)
        delta = float(np.max(np.abs(sx - sy)))
        scale = max(1.0, float(np.max(np.abs(sx))), float(np.max(np.abs(sy))))
        results[name] = delta <= rel_tol * scale
        deltas[name] = delta
    return CospectralReport(results["adjacency"], results["laplacian"],
                            results["signless_laplacian"], deltas)


# ---------------------------------------------------------------------------
# circulant criterion

class CirculantVerdict(Enum):
    CRITERION_HOLDS = "criterion-holds"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CirculantCriterion:
    verdict: CirculantVerdict
    class_count: int
    expected_count: int
    n: int

    @property
    def holds(self) -> bool:
        return self.verdict is CirculantVerdict.CRITERION_HOLDS


def circulant_no_quantum_symmetry(n: int, connection_set) -> CirculantCriterion:
    """One-directional class-count test for absence of quantum symmetry.

    The criterion holds when n != 4 and the configuration has exactly
    floor(n/2) + 1 classes (the distance classes of the n-cycle); anything
    else is inconclusive, never a positive claim of quantum symmetry.
    """
    from .graphs import circulant

    c = wl_closure(circulant(n, connection_set))
    expected = n // 2 + 1
    if n != 4 and c.r == expected:
        return CirculantCriterion(CirculantVerdict.CRITERION_HOLDS, c.r, expected, n)
    return CirculantCriterion(CirculantVerdict.INCONCLUSIVE, c.r, expected, n)


# ---------------------------------------------------------------------------
# text formats

def write_configuration(c: CoherentConfiguration) -> str:
    """Line 1 ``n r``; n rows of class ids; then sparse ``i j k p`` lines."""
    lines = [f"{c.n} {c.r}"]
    for row in c.colors:
        lines.append(" ".join(str(int(v)) for v in row))
    for (i, j, k), p in sorted(c.intersection_numbers.items()):
        lines.append(f"{i} {j} {k} {p}")
    return "\n".join(lines) + "\n"


def read_configuration(text: str) -> CoherentConfiguration:
    rows: list[list[int]] = []
    header: tuple[int, int] | None = None
    numbers: dict[tuple[int, int, int], int] = {}
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
            if len(vals) != 2:
                raise FormatError(lineno, "expected header 'n r'")
            header = (vals[0], vals[1])
            continue
        n, r = header
        if len(rows) < n:
            if len(vals) != n:
                raise FormatError(lineno, f"expected {n} class ids")
            if any(v < 0 or v >= r for v in vals):
                raise FormatError(lineno, f"class ids must lie in 0..{r - 1}")
            rows.append(vals)
        else:
            if len(vals) != 4:
                raise FormatError(lineno, "expected intersection line 'i j k p'")
            numbers[(vals[0], vals[1], vals[2])] = vals[3]
    if header is None or len(rows) != header[0]:
        raise FormatError(1, "incomplete configuration matrix")
    config = CoherentConfiguration(header[0], np.array(rows, dtype=np.int64))
    if config.r != header[1]:
        raise FormatError(1, f"header announced {header[1]} classes, matrix uses {config.r}")
    if numbers and numbers != config.intersection_numbers:
        raise FormatError(1, "intersection numbers disagree with the class matrix")
    return config


def write_certificate(cert: EquivalenceCertificate) -> str:
    lines = [f"{i} {cert.class_map[i]}" for i in sorted(cert.class_map)]
    return "\n".join(lines) + "\n"


def read_certificate(text: str, n: int, r: int) -> EquivalenceCertificate:
    mapping: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(lineno, "expected 'i f(i)'")
        try:
            i, fi = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(lineno, "expected integers") from None
        if i in mapping:
            raise FormatError(lineno, f"class {i} mapped twice")
        mapping[i] = fi
    if sorted(mapping) != list(range(r)) or sorted(mapping.values()) != list(range(r)):
        raise FormatError(1, f"mapping is not a bijection on 0..{r - 1}")
    return EquivalenceCertificate(n, r, mapping, True)
