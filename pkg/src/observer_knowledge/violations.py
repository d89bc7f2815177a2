"""Uncertainty-principle witnesses for unphysical density matrices.

For observables ``A`` and ``B`` the Robertson deficit is

    <(dA)^2> <(dB)^2> - |<dA dB>|^2,   dO = O - <O> I.

It is non-negative for every positive semidefinite state. A negative value is
a concrete witness that a density matrix describes no realisable state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .density import (
    SIGMA_X,
    SIGMA_Y,
    DensityMatrix,
    Physicality,
    as_matrix,
    is_hermitian,
    offdiag_observable,
    physicality,
)
from .errors import DomainError, ShapeError, UsageError

DIAGONAL_TOL = 1e-12
# slack on p_i p_j >= |c|^2 so that exact-boundary inputs survive rounding
PRODUCT_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class ViolationWitness:
    obs_a: np.ndarray
    obs_b: np.ndarray
    lhs: float
    rhs: float
    deficit: float

    @property
    def valid(self) -> bool:
        return self.deficit < 0


def _check_observable(rho: DensityMatrix, obs, name: str) -> np.ndarray:
    o = as_matrix(obs)
    if o.shape != rho.matrix.shape:
        raise ShapeError(f"{name} has shape {o.shape}, expected {rho.matrix.shape}")
    if not is_hermitian(o, rho.herm_tol):
        raise DomainError(f"{name} is not Hermitian")
    return o


def robertson_deficit(rho: DensityMatrix, a, b) -> ViolationWitness:
    a = _check_observable(rho, a, "a")
    b = _check_observable(rho, b, "b")
    r = rho.matrix
    eye = np.eye(rho.dim)
    da = a - np.trace(r @ a).real * eye
    db = b - np.trace(r @ b).real * eye
    var_a = np.trace(r @ da @ da).real
    var_b = np.trace(r @ db @ db).real
    # <dA dB> is complex in general
    cross = np.trace(r @ da @ db)
    lhs = float(var_a * var_b)
    rhs = float(abs(cross) ** 2)
    return ViolationWitness(a, b, lhs, rhs, lhs - rhs)


def find_witness(rho: DensityMatrix) -> Optional[ViolationWitness]:
    """Return an observable pair with negative Robertson deficit, if ``rho`` is unphysical.

    The pair sits in the plane of the largest positive and most negative
    eigenvalues. In two dimensions it is ``(sigma_x, sigma_y)`` in the
    eigenbasis and the deficit is ``4 p1 p2``; in higher dimensions it is the
    half-scaled pair ``(O_x(1,2), O_y(1,2))`` and the deficit is ``p1 p2 / 4``.
    """
    vals, vecs = np.linalg.eigh(0.5 * (rho.matrix + rho.matrix.conj().T))
    if vals[0] >= rho.eig_floor:
        return None
    i_neg, i_pos = 0, len(vals) - 1
    n = rho.dim
    if n == 2:
        # the deficit is symmetric in the two eigenvalues, so ordering is irrelevant
        a_eig, b_eig = SIGMA_X, SIGMA_Y
    else:
        a_eig = np.zeros((n, n), dtype=complex)
        b_eig = np.zeros((n, n), dtype=complex)
        sub_x = offdiag_observable(2, 0, 1, "x")
        sub_y = offdiag_observable(2, 0, 1, "y")
        idx = np.ix_([i_pos, i_neg], [i_pos, i_neg])
        a_eig[idx] = sub_x
        b_eig[idx] = sub_y
    a = vecs @ a_eig @ vecs.conj().T
    b = vecs @ b_eig @ vecs.conj().T
    return robertson_deficit(rho, 0.5 * (a + a.conj().T), 0.5 * (b + b.conj().T))


def inject_offdiagonal(
    rho_a: DensityMatrix, element: complex, i: int, j: int
) -> Tuple[DensityMatrix, Physicality]:
    """Place another observer's coherence ``element`` at ``(i, j)`` of a diagonal matrix.

    The verdict is physical only when ``p_i p_j >= |element|^2`` and the full
    spectrum is non-negative. The first condition is necessary; the second is
    the authority.
    """
    if i == j:
        raise UsageError("injection needs two distinct indices")
    if i > j:
        raise UsageError("injection expects i < j")
    n = rho_a.dim
    if not (0 <= i < n and 0 <= j < n):
        raise UsageError(f"indices ({i}, {j}) out of range for dim {n}")
    m = np.array(rho_a.matrix)
    off = m - np.diag(np.diag(m))
    if np.max(np.abs(off)) > DIAGONAL_TOL:
        raise DomainError("rho_a must be diagonal")
    m[i, j] = element
    m[j, i] = np.conj(element)
    out = DensityMatrix(m, rho_a.herm_tol, rho_a.eig_floor)
    p_i, p_j = m[i, i].real, m[j, j].real
    pair_ok = p_i * p_j - abs(element) ** 2 >= -PRODUCT_SLACK
    spectrum = physicality(out)
    return out, Physicality(pair_ok and spectrum.physical, spectrum.min_eigenvalue)
