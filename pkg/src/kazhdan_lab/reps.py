"""Finite-dimensional unitary representations and their commutant projection.

A compact representation splits as ``H = sum_j sum_{u in I_j} H_{u,j}``, where
the copies ``H_{u,j}`` of class j all carry the same irreducible of dimension
``d_j``. With isometries ``V_u`` onto the copies (chosen so that
``V_u^* pi(g) V_u`` is the same matrix for every u), the orthogonal
projection of a Hilbert-Schmidt operator A onto the commutant is

    P A = sum_j (1/d_j) sum_{u,v} tr(V_u^* A V_v) V_u V_v^*,

and the invariant mean of ``|<pi(g) x, y>|^2`` equals ``||b_{x,y}||^2`` with
``b_{x,y} = sum_j d_j^{-1/2} sum_u x_{u,j} (x) conj(y_{u,j})``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from .config import ReprConfig
from .errors import (
    AmbiguousClusterError,
    DecompositionError,
    DimensionError,
    RepresentationError,
    SchemaError,
)

_DEFAULTS = ReprConfig()


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """``<a, b>``, linear in a and conjugate-linear in b."""
    return complex(np.vdot(b, a))


@dataclass(frozen=True, eq=False)
class UnitaryRep:
    """Generators of a unitary representation.

    ``group`` is "Z" (one generator), "Z^d" (d commuting generators) or
    "finite"/"compact" (any generators; decompositions must then be
    supplied). ``elements`` optionally lists every group element's matrix so
    that exact group averages can be taken.
    """

    generators: tuple
    group: str = "Z"
    elements: tuple | None = None
    tol: float = _DEFAULTS.unitary_tol

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise RepresentationError("need at least one generator")
        d = gens[0].shape[0]
        for U in gens:
            if U.shape != (d, d):
                raise RepresentationError("generators must be square and of one size")
            if np.linalg.norm(U.conj().T @ U - np.eye(d)) > self.tol:
                raise RepresentationError("generator is not unitary")
        if self.group == "Z" and len(gens) != 1:
            raise RepresentationError("a representation of Z has exactly one generator")
        if self.abelian:
            for i, A in enumerate(gens):
                for B in gens[i + 1:]:
                    if np.linalg.norm(A @ B - B @ A) > self.tol:
                        raise RepresentationError("generators of an abelian group must commute")

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    @property
    def abelian(self) -> bool:
        return self.group == "Z" or self.group.startswith("Z^")

    def power(self, n: int, generator: int = 0) -> np.ndarray:
        return np.linalg.matrix_power(self.generators[generator], n) if n >= 0 else \
            np.linalg.matrix_power(self.generators[generator].conj().T, -n)

    def act(self, word, x: np.ndarray) -> np.ndarray:
        """Apply the group element ``prod g_i^{n_i}`` given as exponents per generator."""
        out = np.asarray(x, dtype=complex)
        for i, n in enumerate(np.atleast_1d(word)):
            out = self.power(int(n), i) @ out
        return out


@dataclass
class BlockClass:
    """One equivalence class: ``copies[u]`` is a d x d_j isometry onto H_{u,j}."""

    label: tuple
    copies: list
    irrep_dim: int

    @property
    def multiplicity(self) -> int:
        return len(self.copies)

    def stack(self) -> np.ndarray:
        """Array of shape (multiplicity, d, d_j)."""
        return np.stack(self.copies)


@dataclass
class BlockDecomposition:
    classes: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return sum(c.multiplicity * c.irrep_dim for c in self.classes)

    def isometry(self) -> np.ndarray:
        return np.hstack([V for c in self.classes for V in c.copies])

    def validate(self, rep: UnitaryRep, tol: float = 1e-8) -> None:
        """Orthogonal, exhaustive, invariant, and consistent within each class."""
        if self.dim != rep.dim:
            raise DecompositionError(f"blocks cover {self.dim} dimensions, representation has {rep.dim}")
        W = self.isometry()
        if np.linalg.norm(W.conj().T @ W - np.eye(rep.dim)) > tol:
            raise DecompositionError("copies are not orthonormal and exhaustive")
        for U in rep.generators:
            for c in self.classes:
                ref = None
                for V in c.copies:
                    block = V.conj().T @ U @ V
                    if np.linalg.norm(U @ V - V @ block) > tol:
                        raise DecompositionError("a copy is not invariant under the generators")
                    if ref is None:
                        ref = block
                    elif np.linalg.norm(block - ref) > tol:
                        raise DecompositionError("copies of one class carry different matrices")

    def components(self, x: np.ndarray) -> list:
        """Per class, the array of coordinates ``x_{u,j} = V_u^* x`` (shape (m_j, d_j))."""
        x = np.asarray(x, dtype=complex)
        return [np.einsum("uab,a->ub", c.stack().conj(), x) for c in self.classes]

    def to_json(self) -> str:
        classes = []
        for c in self.classes:
            classes.append({
                "eigenvalues": [[complex(z).real, complex(z).imag] for z in c.label],
                "multiplicity": c.multiplicity,
                "dim": c.irrep_dim,
                "basis": [[[[v.real, v.imag] for v in row] for row in V] for V in c.copies],
            })
        return json.dumps({"classes": classes}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> BlockDecomposition:
        try:
            data = json.loads(text)
            classes = []
            for c in data["classes"]:
                copies = [np.array([[complex(re, im) for re, im in row] for row in V]) for V in c["basis"]]
                label = tuple(complex(re, im) for re, im in c.get("eigenvalues", []))
                dim = int(c.get("dim", copies[0].shape[1]))
                if len(copies) != int(c.get("multiplicity", len(copies))):
                    raise SchemaError("multiplicity does not match the number of copies")
                classes.append(BlockClass(label, copies, dim))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SchemaError(f"malformed decomposition: {exc}") from exc
        return cls(classes)


# ---------------------------------------------------------------------------
# joint eigendecomposition
# ---------------------------------------------------------------------------


def cluster(values: np.ndarray, tol: float) -> list:
    """Group nearby complex numbers; returns index lists.

    Values closer than ``tol`` are merged. A pair separated by between ``tol``
    and ``10 tol``, or a chain of merges whose spread exceeds ``tol``, is
    ambiguous and raises AmbiguousClusterError.
    """
    values = np.asarray(values, dtype=complex)
    n = len(values)
    dist = np.abs(values[:, None] - values[None, :])
    marginal = (dist >= tol) & (dist < 10 * tol)
    if np.any(marginal):
        i, j = np.argwhere(marginal)[0]
        raise AmbiguousClusterError(
            f"eigenvalues {values[i]:.12g} and {values[j]:.12g} are {dist[i, j]:.3g} apart, "
            f"too close to the clustering tolerance {tol:g}; choose another tolerance"
        )
    labels = -np.ones(n, dtype=int)
    groups = []
    for i in range(n):
        if labels[i] >= 0:
            continue
        stack, members = [i], []
        labels[i] = len(groups)
        while stack:
            k = stack.pop()
            members.append(k)
            for m in np.nonzero((dist[k] < tol) & (labels < 0))[0]:
                labels[m] = len(groups)
                stack.append(m)
        sub = dist[np.ix_(members, members)]
        if sub.max() >= tol:
            raise AmbiguousClusterError("eigenvalue cluster spreads beyond the tolerance")
        groups.append(sorted(members))
    return groups


def _split(gens, basis, tol, prefix):
    """Recursively split ``span(basis)`` by the eigenvalues of each generator."""
    if not gens:
        return [(prefix, basis)]
    U = gens[0]
    restricted = basis.conj().T @ U @ basis
    T, Z = schur(restricted, output="complex")
    eig = np.diag(T)
    out = []
    for members in cluster(eig, tol):
        lam = complex(np.mean(eig[members]))
        lam /= abs(lam)
        sub = basis @ Z[:, members]
        out.extend(_split(gens[1:], sub, tol, prefix + (lam,)))
    return out


def decompose(rep: UnitaryRep, cluster_tol: float = _DEFAULTS.cluster_tol,
              residual_tol: float = _DEFAULTS.residual_tol) -> BlockDecomposition:
    """Joint eigenspaces of an abelian representation, one class per eigenvalue tuple."""
    if not rep.abelian:
        raise DecompositionError("automatic decomposition needs an abelian group; supply a BlockDecomposition")
    parts = _split(list(rep.generators), np.eye(rep.dim, dtype=complex), cluster_tol, ())
    classes = []
    for label, basis in parts:
        for U, lam in zip(rep.generators, label):
            if np.max(np.linalg.norm(U @ basis - lam * basis, axis=0)) > residual_tol:
                raise DecompositionError(f"eigenvector residual above {residual_tol} for eigenvalue {lam}")
        classes.append(BlockClass(label, [basis[:, [i]] for i in range(basis.shape[1])], 1))
    classes.sort(key=lambda c: tuple((round(np.angle(z) % (2 * np.pi), 9)) for z in c.label))
    return BlockDecomposition(classes)


# ---------------------------------------------------------------------------
# commutant projection and mean-square formulas
# ---------------------------------------------------------------------------


def _check(rep: UnitaryRep, decomp: BlockDecomposition) -> None:
    if decomp.dim != rep.dim:
        raise DecompositionError(f"decomposition covers {decomp.dim} dimensions, representation has {rep.dim}")


def block_traces(decomp: BlockDecomposition, A: np.ndarray) -> list:
    """Per class, the matrix ``tr(V_u^* A V_v)`` over pairs of copies."""
    A = np.asarray(A, dtype=complex)
    out = []
    for c in decomp.classes:
        V = c.stack()
        out.append(np.einsum("uai,ab,vbi->uv", V.conj(), A, V))
    return out


def commutant_projection(rep: UnitaryRep, decomp: BlockDecomposition, A) -> np.ndarray:
    """``sum_j (1/d_j) sum_{u,v} tr(A_{u,v}) V_u V_v^*``."""
    _check(rep, decomp)
    A = np.asarray(A, dtype=complex)
    if A.shape != (rep.dim, rep.dim):
        raise DimensionError("operator size does not match the representation")
    out = np.zeros_like(A)
    for c, tr in zip(decomp.classes, block_traces(decomp, A)):
        V = c.stack()
        out += np.einsum("uv,uai,vbi->ab", tr, V, V.conj()) / c.irrep_dim
    return out


def projection_norm(rep: UnitaryRep, decomp: BlockDecomposition, A) -> float:
    """``||P A||_HS`` from ``sum_j (1/d_j) sum_{u,v} |tr A_{u,v}|^2``."""
    _check(rep, decomp)
    total = sum(float(np.sum(np.abs(tr) ** 2)) / c.irrep_dim
                for c, tr in zip(decomp.classes, block_traces(decomp, A)))
    return float(np.sqrt(total))


@dataclass
class BVector:
    """Per class j, the d_j x d_j matrix ``d_j^{-1/2} sum_u x_{u,j} conj(y_{u,j})^T``."""

    blocks: list

    @property
    def norm_squared(self) -> float:
        return float(sum(np.sum(np.abs(B) ** 2) for B in self.blocks))


def b_vector(decomp: BlockDecomposition, x, y) -> BVector:
    blocks = []
    for c, xs, ys in zip(decomp.classes, decomp.components(x), decomp.components(y)):
        blocks.append(np.einsum("ua,ub->ab", xs, ys.conj()) / np.sqrt(c.irrep_dim))
    return BVector(blocks)


def mean_square_coefficient(rep: UnitaryRep, decomp: BlockDecomposition, x, y) -> float:
    """Invariant mean of ``|<pi(g) x, y>|^2``, as ``||b_{x,y}||^2``."""
    _check(rep, decomp)
    return b_vector(decomp, x, y).norm_squared


def mean_square_gram(decomp: BlockDecomposition, x, y) -> float:
    """Same quantity from Gram matrices: ``sum_j (1/d_j) sum_{u,v} <x_u,x_v> conj<y_u,y_v>``."""
    total = 0.0
    for c, xs, ys in zip(decomp.classes, decomp.components(x), decomp.components(y)):
        gx = xs.conj() @ xs.T  # gx[v, u] = <x_u, x_v>
        gy = ys.conj() @ ys.T
        total += float(np.real(np.sum(gx * gy.conj()))) / c.irrep_dim
    return total


def mean_square_upper_bound(rep: UnitaryRep, decomp: BlockDecomposition, x, y) -> float:
    """``sum_j (1/d_j) ||x~_j||^2 ||y~_j||^2`` with x~_j the isotypic component."""
    _check(rep, decomp)
    total = 0.0
    for c, xs, ys in zip(decomp.classes, decomp.components(x), decomp.components(y)):
        total += float(np.sum(np.abs(xs) ** 2) * np.sum(np.abs(ys) ** 2)) / c.irrep_dim
    return total


def cesaro_mean_square(rep: UnitaryRep, x, y, N: int) -> float:
    """``(1/(2N+1)) sum_{|n|<=N} |<U^n x, y>|^2`` by repeated multiplication."""
    if rep.group != "Z":
        raise RepresentationError("the Cesaro oracle is implemented for Z")
    U = rep.generators[0]
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    total = abs(inner(x, y)) ** 2
    fwd, back = x.copy(), x.copy()
    Ui = U.conj().T
    for _ in range(N):
        fwd = U @ fwd
        back = Ui @ back
        total += abs(inner(fwd, y)) ** 2 + abs(inner(back, y)) ** 2
    return total / (2 * N + 1)


def cesaro_commutant_average(rep: UnitaryRep, A, N: int) -> np.ndarray:
    """``(1/(2N+1)) sum_{|n|<=N} U^n A U^{-n}``."""
    if rep.group != "Z":
        raise RepresentationError("the Cesaro oracle is implemented for Z")
    U = rep.generators[0]
    Ui = U.conj().T
    A = np.asarray(A, dtype=complex)
    total = A.copy()
    fwd, back = A.copy(), A.copy()
    for _ in range(N):
        fwd = U @ fwd @ Ui
        back = Ui @ back @ U
        total += fwd + back
    return total / (2 * N + 1)


def group_average(rep: UnitaryRep, A) -> np.ndarray:
    """``(1/|G|) sum_g pi(g) A pi(g)^*`` over the listed elements of a finite group."""
    if rep.elements is None:
        raise RepresentationError("group elements were not supplied")
    A = np.asarray(A, dtype=complex)
    return sum(g @ A @ g.conj().T for g in rep.elements) / len(rep.elements)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def tensor(a: UnitaryRep, b: UnitaryRep, cap: int = _DEFAULTS.dimension_cap) -> UnitaryRep:
    if a.group != b.group or len(a.generators) != len(b.generators):
        raise RepresentationError("tensor product needs representations of the same group")
    if a.dim * b.dim > cap:
        raise DimensionError(f"tensor dimension {a.dim * b.dim} exceeds the cap {cap}")
    gens = tuple(np.kron(A, B) for A, B in zip(a.generators, b.generators))
    elements = None
    if a.elements is not None and b.elements is not None and len(a.elements) == len(b.elements):
        elements = tuple(np.kron(A, B) for A, B in zip(a.elements, b.elements))
    return UnitaryRep(gens, a.group, elements)


def conjugate(rep: UnitaryRep) -> UnitaryRep:
    elements = None if rep.elements is None else tuple(np.conj(g) for g in rep.elements)
    return UnitaryRep(tuple(np.conj(g) for g in rep.generators), rep.group, elements)


def invariant_dimension(rep: UnitaryRep, cluster_tol: float = _DEFAULTS.cluster_tol) -> int:
    """Dimension of the joint fixed space (all eigenvalues equal to 1)."""
    if rep.dim > _DEFAULTS.dimension_cap:
        raise DimensionError(f"dimension {rep.dim} exceeds the cap")
    decomp = decompose(rep, cluster_tol)
    return sum(c.multiplicity for c in decomp.classes if all(abs(z - 1) < cluster_tol for z in c.label))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_spectral_unitary(rng: np.random.Generator, d: int, min_gap: float = 0.3,
                            distinct: int | None = None) -> np.ndarray:
    """Unitary with ``distinct`` eigenphases separated by at least ``min_gap``,
    repeated to fill dimension d, in a random orthonormal basis."""
    k = distinct or d
    if k * min_gap >= 2 * np.pi:
        raise ValueError("too many eigenvalues for the requested gap")
    slack = 2 * np.pi - k * min_gap
    cuts = np.sort(rng.uniform(0, slack, size=k))
    phases = cuts + min_gap * np.arange(k) + rng.uniform(0, 2 * np.pi)
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=d - k)])
    Q = random_unitary(rng, d)
    return Q @ np.diag(np.exp(1j * phases[labels])) @ Q.conj().T


# ---------------------------------------------------------------------------
# matrix I/O
# ---------------------------------------------------------------------------


def write_matrix_csv(path, M) -> None:
    M = np.asarray(M, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in M:
            w.writerow([repr(float(v)) for z in row for v in (z.real, z.imag)])


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            vals = [float(v) for v in row]
            if len(vals) % 2:
                raise SchemaError("matrix rows must interleave real and imaginary parts")
            rows.append([complex(a, b) for a, b in zip(vals[::2], vals[1::2])])
    M = np.array(rows, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SchemaError("matrix file must hold a square matrix")
    return M
