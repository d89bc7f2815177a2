"""Combining what two observers know.

Two situations are covered. Observers measuring non-commuting spin components
(``z`` and ``x``) can pool data into a matrix that is not a valid state.
Observers measuring commuting quantities (electron and nuclear spin) always
end up with a valid product-basis state. The commutation and product criteria
are available as standalone checks.

Data-driven expectation values use the uniform-prior estimate
``(n_up - n_down) / (n + 2)``, never raw frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .bayes import CountData
from .density import (
    PAULI,
    DensityMatrix,
    IDENTITY2,
    Physicality,
    as_matrix,
    commutator,
    frobenius,
    is_hermitian,
    physicality,
)
from .errors import DomainError, ShapeError, UsageError

AXES = ("z", "x", "y", "electron", "nuclear")
PRODUCT_ZERO_TOL = 1e-12
COMMUTATOR_TOL = 1e-9


@dataclass(frozen=True)
class ObserverRecord:
    """One observer's counts on a spin axis or a subsystem."""

    label: str
    axis_or_subsystem: str
    counts: CountData

    def __post_init__(self):
        if self.axis_or_subsystem not in AXES:
            raise DomainError(f"unknown axis or subsystem {self.axis_or_subsystem!r}")

    @property
    def axis(self) -> str:
        return self.axis_or_subsystem


def data_expectation(d: CountData) -> float:
    """``(n_up - n_down) / (n + 2)``, the uniform-prior posterior mean."""
    return (d.n_up - d.n_down) / (d.n + 2)


def outcome_probs(d: CountData) -> np.ndarray:
    """``((n_up + 1) / (n + 2), (n_down + 1) / (n + 2))``."""
    return np.array([d.n_up + 1, d.n_down + 1], dtype=float) / (d.n + 2)


def observer_density(r: ObserverRecord) -> DensityMatrix:
    """Density matrix of a single observer.

    Spin-axis observers get ``(I + <s> sigma_axis) / 2`` with the other two
    components set to zero. Subsystem observers get the diagonal matrix of
    their outcome probabilities on their own two-level space.
    """
    if r.axis in ("electron", "nuclear"):
        return DensityMatrix(np.diag(outcome_probs(r.counts)).astype(complex))
    s = data_expectation(r.counts)
    return DensityMatrix(0.5 * (IDENTITY2 + s * PAULI[r.axis]))


@dataclass(frozen=True)
class MergeReport:
    merged: DensityMatrix
    commutator_norm: float
    product_nonzero: bool
    verdict: Physicality

    @property
    def physical(self) -> bool:
        return self.verdict.physical


def _pair_report(a: DensityMatrix, b: DensityMatrix, merged: DensityMatrix) -> MergeReport:
    return MergeReport(
        merged=merged,
        commutator_norm=frobenius(commutator(a.matrix, b.matrix)),
        product_nonzero=frobenius(a.matrix @ b.matrix) > PRODUCT_ZERO_TOL,
        verdict=physicality(merged),
    )


def noncommuting_entries(z: CountData, x: CountData):
    """``(p_up, p_down, delta_x)`` of the pooled z/x matrix as exact fractions."""
    p_up = Fraction(z.n_up + 1, z.n + 2)
    p_down = Fraction(z.n_down + 1, z.n + 2)
    delta_x = Fraction(x.n_up - x.n_down, 2 * (x.n + 2))
    return p_up, p_down, delta_x


def violation_margin(z: CountData, x: CountData) -> Fraction:
    """``delta_x**2 - p_up * p_down`` in exact arithmetic.

    Positive means the pooled matrix has a negative eigenvalue; zero is the
    boundary, where the smallest eigenvalue is exactly zero.
    """
    p_up, p_down, dx = noncommuting_entries(z, x)
    return dx * dx - p_up * p_down


def merge_noncommuting(z: ObserverRecord, x: ObserverRecord) -> MergeReport:
    """Pool a z-axis observer with an x-axis observer.

    The pooled matrix is ``[[p_up, dx], [dx, p_down]]``. It is built even when
    it is unphysical; the report carries the verdict.
    """
    if z.axis != "z" or x.axis != "x":
        raise UsageError(
            f"non-commuting merge needs axes ('z', 'x'), got ({z.axis!r}, {x.axis!r})"
        )
    p_up, p_down, dx = (float(v) for v in noncommuting_entries(z.counts, x.counts))
    merged = DensityMatrix(np.array([[p_up, dx], [dx, p_down]], dtype=complex))
    return _pair_report(observer_density(z), observer_density(x), merged)


def _prob_vector(p: Sequence[float], name: str = "probability vector") -> np.ndarray:
    v = np.asarray(p, dtype=float).ravel()
    if v.size == 0:
        raise DomainError(f"{name} is empty")
    if np.any(v < 0) or np.any(v > 1) or not np.all(np.isfinite(v)):
        raise DomainError(f"{name} entries must lie in [0, 1]")
    if abs(v.sum() - 1.0) > 1e-9:
        raise DomainError(f"{name} sums to {v.sum()!r}, not 1")
    return v


def merge_commuting(a_probs: Sequence[float], b_probs: Sequence[float]) -> DensityMatrix:
    """Diagonal matrix of all products ``p_a * p_b``; the first index is slow."""
    a = _prob_vector(a_probs, "a_probs")
    b = _prob_vector(b_probs, "b_probs")
    return DensityMatrix(np.diag(np.kron(a, b)).astype(complex))


def partial_knowledge_density(
    known: Sequence[float], other_dim: int, known_first: bool = True
) -> DensityMatrix:
    """Product-basis matrix of an observer ignorant of the other subsystem.

    The unknown subsystem gets probability ``1 / other_dim`` per outcome.
    ``known_first`` says whether the known subsystem is the slow index.
    """
    p = _prob_vector(known, "known")
    if other_dim < 1:
        raise DomainError("other_dim must be positive")
    flat = np.full(other_dim, 1.0 / other_dim)
    diag = np.kron(p, flat) if known_first else np.kron(flat, p)
    return DensityMatrix(np.diag(diag).astype(complex))


def merge_subsystems(e: ObserverRecord, n: ObserverRecord) -> MergeReport:
    """Pool an electron observer with a nuclear observer (commuting case)."""
    if e.axis != "electron" or n.axis != "nuclear":
        raise UsageError(
            f"commuting merge needs ('electron', 'nuclear'), got ({e.axis!r}, {n.axis!r})"
        )
    pe, pn = outcome_probs(e.counts), outcome_probs(n.counts)
    rho_e = partial_knowledge_density(pe, pn.size, known_first=True)
    rho_n = partial_knowledge_density(pn, pe.size, known_first=False)
    return _pair_report(rho_e, rho_n, merge_commuting(pe, pn))


@dataclass(frozen=True)
class ProductVerdict:
    """Outcome of the product criterion.

    ``warning`` is set when the inputs do not commute, where the criterion
    has no justification.
    """

    compatible: bool
    product_norm: float
    commutator_norm: float
    warning: Optional[str] = None

    def __str__(self) -> str:
        return "compatible" if self.compatible else "contradictory"


def product_criterion(a: DensityMatrix, b: DensityMatrix) -> ProductVerdict:
    """Two observers contradict each other when ``a @ b`` vanishes."""
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch: {a.dim} vs {b.dim}")
    prod = frobenius(a.matrix @ b.matrix)
    comm = frobenius(commutator(a.matrix, b.matrix))
    warning = None
    if comm > COMMUTATOR_TOL:
        warning = (
            f"matrices do not commute (commutator norm {comm:.3g}); "
            "the product criterion assumes commuting density matrices"
        )
    return ProductVerdict(prod > PRODUCT_ZERO_TOL, prod, comm, warning)


def density_from_observable(obs, lam: Optional[float] = None) -> DensityMatrix:
    """``(A + lam I) / Tr[A + lam I]``.

    With ``lam=None`` the shift is ``|min eigenvalue of A| + 1``, which makes
    the result positive definite.
    """
    a = as_matrix(obs)
    if not is_hermitian(a):
        raise DomainError("observable is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    if lam is None:
        lam = abs(float(np.linalg.eigvalsh(a)[0])) + 1.0
    shifted = a + lam * np.eye(n)
    tr = float(np.trace(shifted).real)
    if tr <= 0:
        raise DomainError(f"Tr[A + lam I] = {tr} is not positive; increase lam")
    return DensityMatrix(shifted / tr)
