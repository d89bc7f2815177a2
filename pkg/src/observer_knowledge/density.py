"""Finite-dimensional density matrices built from measurement probabilities.

A density matrix here is the knowledge of one observer. It is always Hermitian
with unit trace, but positive semidefiniteness is *not* enforced: matrices
assembled from inaccurate data can carry negative eigenvalues, and detecting
that is the point of :func:`physicality`.

The observable basis for dimension ``N`` consists of

* ``N`` projectors ``O(m, m) = |m><m|``,
* ``N(N-1)/2`` observables ``O_x(k, l) = (|k><l| + |l><k|) / 2``,
* ``N(N-1)/2`` observables ``O_y(k, l) = (-i|k><l| + i|l><k|) / 2``,

ordered by ``m`` ascending, then off-diagonal pairs ``(k, l)`` in
lexicographic order with ``x`` before ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .errors import DomainError, NormalizationError, ShapeError

MAX_DIM = 64
HERM_TOL = 1e-9
EIG_FLOOR = -1e-10
PROB_TOL = 1e-9

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def as_matrix(entries) -> np.ndarray:
    """Coerce ``entries`` to a square complex array of allowed dimension."""
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    if not 1 <= m.shape[0] <= MAX_DIM:
        raise ShapeError(f"dimension {m.shape[0]} outside [1, {MAX_DIM}]")
    return m


def hermiticity_error(m: np.ndarray) -> float:
    """Largest entrywise deviation ``|m_ij - conj(m_ji)|``."""
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return hermiticity_error(m) <= tol


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, "fro"))


def pair_indices(dim: int) -> List[Tuple[int, int]]:
    """Zero-based ``(k, l)`` pairs with ``k < l`` in lexicographic order."""
    return list(combinations(range(dim), 2))


@dataclass(frozen=True)
class Physicality:
    """Verdict on positive semidefiniteness, carrying the smallest eigenvalue."""

    physical: bool
    min_eigenvalue: float

    def __str__(self) -> str:
        return "physical" if self.physical else "unphysical"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, trace-one matrix describing what an observer knows.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix of dimension 1..64.
    herm_tol : float
        Tolerance for the Hermitian and unit-trace checks.
    eig_floor : float
        Eigenvalues at or above this count as non-negative.
    """

    matrix: np.ndarray
    herm_tol: float = HERM_TOL
    eig_floor: float = EIG_FLOOR

    def __post_init__(self):
        m = as_matrix(self.matrix)
        err = hermiticity_error(m)
        if err > self.herm_tol:
            raise DomainError(f"matrix is not Hermitian (deviation {err:.3g})")
        tr = np.trace(m)
        if abs(tr.real - 1.0) > self.herm_tol:
            raise NormalizationError(f"trace {tr.real!r} differs from 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues of the Hermitian part."""
        return np.linalg.eigvalsh(_hermitian_part(self.matrix))

    def physicality(self) -> Physicality:
        return physicality(self)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, matrix={self.matrix.tolist()!r})"


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def physicality(rho: DensityMatrix) -> Physicality:
    """Report whether ``rho`` is positive semidefinite.

    Uses a dense Hermitian eigen-solver. Pure states, whose smallest eigenvalue
    is zero up to rounding, count as physical.
    """
    lam_min = float(rho.eigenvalues()[0])
    return Physicality(lam_min >= rho.eig_floor, lam_min)


@dataclass(frozen=True)
class BlochVector:
    """Pauli expectation values ``(<sigma_x>, <sigma_y>, <sigma_z>)``."""

    sx: float
    sy: float
    sz: float

    def __post_init__(self):
        for name in ("sx", "sy", "sz"):
            v = float(getattr(self, name))
            if not -1.0 <= v <= 1.0:
                raise DomainError(f"{name}={v} outside [-1, 1]")
            object.__setattr__(self, name, v)

    @property
    def length(self) -> float:
        return float(np.sqrt(self.sx**2 + self.sy**2 + self.sz**2))

    def component(self, axis: str) -> float:
        return {"x": self.sx, "y": self.sy, "z": self.sz}[axis]

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.sx, self.sy, self.sz)


def pauli_expand(b: BlochVector) -> DensityMatrix:
    """Return ``(I + sx X + sy Y + sz Z) / 2``.

    The result has unit trace exactly; it is unphysical whenever the Bloch
    vector is longer than one.
    """
    m = 0.5 * (IDENTITY2 + b.sx * SIGMA_X + b.sy * SIGMA_Y + b.sz * SIGMA_Z)
    return DensityMatrix(m)


def expectation(rho: DensityMatrix, obs) -> float:
    """Real expectation value ``Tr[rho O]`` of a Hermitian observable."""
    o = as_matrix(obs)
    if o.shape != rho.matrix.shape:
        raise ShapeError(f"observable shape {o.shape} does not match dim {rho.dim}")
    if not is_hermitian(o, rho.herm_tol):
        raise DomainError("observable is not Hermitian")
    value = np.trace(rho.matrix @ o)
    assert abs(value.imag) <= 1e-9, value
    return float(value.real)


@dataclass(frozen=True, eq=False)
class ObservableBasis:
    """The ``N**2`` Hermitian observables that span ``N x N`` matrices."""

    dim: int
    diag_projectors: Tuple[np.ndarray, ...]
    offdiag_x: Tuple[np.ndarray, ...]
    offdiag_y: Tuple[np.ndarray, ...]
    pairs: Tuple[Tuple[int, int], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.diag_projectors) + len(self.offdiag_x) + len(self.offdiag_y)

    def __iter__(self) -> Iterator[np.ndarray]:
        """Yield observables in serialization order."""
        yield from self.diag_projectors
        for ox, oy in zip(self.offdiag_x, self.offdiag_y):
            yield ox
            yield oy


def offdiag_observable(dim: int, k: int, l: int, kind: str) -> np.ndarray:
    """``a|k><l| + conj(a)|l><k|`` with ``a = 1/2`` (``x``) or ``-i/2`` (``y``)."""
    a = {"x": 0.5, "y": -0.5j}[kind]
    o = np.zeros((dim, dim), dtype=complex)
    o[k, l] = a
    o[l, k] = np.conj(a)
    return o


def build_basis(dim: int) -> ObservableBasis:
    if not 1 <= dim <= MAX_DIM:
        raise DomainError(f"dimension {dim} outside [1, {MAX_DIM}]")
    eye = np.eye(dim, dtype=complex)
    diag = tuple(np.outer(eye[m], eye[m]) for m in range(dim))
    pairs = tuple(pair_indices(dim))
    ox = tuple(offdiag_observable(dim, k, l, "x") for k, l in pairs)
    oy = tuple(offdiag_observable(dim, k, l, "y") for k, l in pairs)
    for o in (*diag, *ox, *oy):
        o.setflags(write=False)
    basis = ObservableBasis(dim, diag, ox, oy, pairs)
    assert len(basis) == dim * dim
    return basis


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Outcome probabilities that fix a density matrix completely.

    ``p_diag[m]`` is the probability of finding basis state ``m``.
    ``delta_x`` and ``delta_y`` hold ``p(+) - p(-)`` for the off-diagonal
    observables, one entry per pair ``k < l`` in lexicographic order.
    """

    p_diag: np.ndarray
    delta_x: np.ndarray
    delta_y: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_diag, dtype=float).ravel()
        dx = np.asarray(self.delta_x, dtype=float).ravel()
        dy = np.asarray(self.delta_y, dtype=float).ravel()
        n = p.size
        if not 1 <= n <= MAX_DIM:
            raise ShapeError(f"dimension {n} outside [1, {MAX_DIM}]")
        npairs = n * (n - 1) // 2
        if dx.size != npairs or dy.size != npairs:
            raise ShapeError(f"expected {npairs} off-diagonal entries for dim {n}")
        if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
            raise DomainError("diagonal probabilities must lie in [0, 1]")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise NormalizationError(f"diagonal probabilities sum to {p.sum()!r}")
        if np.any(np.abs(dx) > 1 + PROB_TOL) or np.any(np.abs(dy) > 1 + PROB_TOL):
            raise DomainError("probability differences must lie in [-1, 1]")
        for name, arr in (("p_diag", p), ("delta_x", dx), ("delta_y", dy)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.p_diag.size


def density_from_probs(t: ProbabilityTable) -> DensityMatrix:
    """Assemble ``rho`` from a probability table.

    Diagonal entries are ``p_m``; entry ``(k, l)`` above the diagonal is
    ``(dx - i dy) / 2`` and the lower triangle is its conjugate.
    """
    n = t.dim
    m = np.diag(t.p_diag.astype(complex))
    for idx, (k, l) in enumerate(pair_indices(n)):
        m[k, l] = 0.5 * (t.delta_x[idx] - 1j * t.delta_y[idx])
        m[l, k] = np.conj(m[k, l])
    return DensityMatrix(m)


def probs_from_density(rho: DensityMatrix) -> ProbabilityTable:
    """Inverse of :func:`density_from_probs` via basis expectation values."""
    basis = build_basis(rho.dim)
    p = [expectation(rho, o) for o in basis.diag_projectors]
    dx = [2.0 * expectation(rho, o) for o in basis.offdiag_x]
    dy = [2.0 * expectation(rho, o) for o in basis.offdiag_y]
    return ProbabilityTable(p, dx, dy)


def maximally_mixed(dim: int) -> DensityMatrix:
    """``I / N``: complete ignorance."""
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def diagonal_density(probs: Sequence[float]) -> DensityMatrix:
    return DensityMatrix(np.diag(np.asarray(probs, dtype=complex)))
