"""Bayesian updating of an observer's knowledge from spin counts.

The unknown is ``sigma = <sigma_z>`` in ``[-1, 1]``. A single atom comes out
up with probability ``(1 + sigma) / 2``, so after ``n_up`` up and ``n_down``
down counts the posterior density is

    p(sigma | D) ∝ (1 + sigma)**n_up * (1 - sigma)**n_down * p0(sigma).

The binomial coefficient cancels and is never formed. Every product of many
probabilities is kept in log space.

Priors come in three kinds. ``uniform`` is the flat density 1/2. ``beta`` is
parametrised on ``(1 + sigma) / 2`` so that ``beta(1, 1)`` is uniform.
``tabulated`` is the piecewise-linear interpolant through user-supplied
``(sigma, weight)`` knots and is zero outside the knots.

All three share one kernel form, ``(1+s)**a (1-s)**b g(s)``, with ``g`` either
constant or piecewise linear. Conjugate priors therefore have closed forms
through the Beta function. Tabulated priors also have a closed form through
the regularised incomplete Beta function. Composite Gauss-Legendre quadrature
is an independent second route for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import betainc, betaln

from .density import DensityMatrix
from .errors import DegeneratePosteriorError, DomainError
from .quadrature import N_NODES, log_integrate

LOG2 = math.log(2.0)
# kernel drops (in nats) below its maximum at which quadrature panels are split
_PANEL_DROPS = (2.0, 8.0, 32.0, 128.0)
_STIRLING_MIN = 20.0


@dataclass(frozen=True)
class CountData:
    """Recorded up and down detector counts on one axis."""

    n_up: int
    n_down: int

    def __post_init__(self):
        for name in ("n_up", "n_down"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def n(self) -> int:
        return self.n_up + self.n_down

    def __add__(self, other: "CountData") -> "CountData":
        return CountData(self.n_up + other.n_up, self.n_down + other.n_down)


def amalgamate(d1: CountData, d2: CountData) -> CountData:
    """Pool two data sets taken on the same observable."""
    return d1 + d2


@dataclass(frozen=True)
class Prior:
    """Prior density over ``sigma``.

    Use :meth:`uniform`, :meth:`beta_prior` or :meth:`tabulated` rather than
    the raw constructor. ``tilt`` multiplies the density by
    ``(1+s)**tilt.n_up (1-s)**tilt.n_down``; it is how a posterior is reused
    as the prior for the next batch of data.
    """

    kind: str = "uniform"
    alpha: float = 1.0
    beta: float = 1.0
    sigma: Tuple[float, ...] = ()
    weight: Tuple[float, ...] = ()
    tilt: CountData = field(default_factory=lambda: CountData(0, 0))

    def __post_init__(self):
        if self.kind not in ("uniform", "beta", "tabulated"):
            raise DomainError(f"unknown prior kind {self.kind!r}")
        if self.kind == "beta":
            if not (self.alpha > 0 and self.beta > 0):
                raise DomainError("beta prior needs alpha > 0 and beta > 0")
        if self.kind == "tabulated":
            s = np.asarray(self.sigma, dtype=float)
            w = np.asarray(self.weight, dtype=float)
            if s.ndim != 1 or s.size < 2 or s.size != w.size:
                raise DomainError("tabulated prior needs >= 2 matching sigma/weight knots")
            if s[0] < -1.0 or s[-1] > 1.0 or np.any(np.diff(s) <= 0):
                raise DomainError("tabulated sigma grid must increase strictly within [-1, 1]")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise DomainError("tabulated weights must be finite and >= 0")
            if not np.any(w > 0):
                raise DegeneratePosteriorError("tabulated prior weights are all zero")
            object.__setattr__(self, "sigma", tuple(float(v) for v in s))
            object.__setattr__(self, "weight", tuple(float(v) for v in w))

    @classmethod
    def uniform(cls) -> "Prior":
        return cls("uniform")

    @classmethod
    def beta_prior(cls, alpha: float, beta: float) -> "Prior":
        return cls("beta", alpha=float(alpha), beta=float(beta))

    @classmethod
    def tabulated(cls, sigma: Sequence[float], weight: Sequence[float]) -> "Prior":
        return cls("tabulated", sigma=tuple(sigma), weight=tuple(weight))

    def exponents(self) -> Tuple[float, float]:
        """Powers of ``(1+s)`` and ``(1-s)`` in the prior kernel."""
        a, b = float(self.tilt.n_up), float(self.tilt.n_down)
        if self.kind == "beta":
            a += self.alpha - 1.0
            b += self.beta - 1.0
        return a, b

    def knots(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        if self.kind != "tabulated":
            return None
        return np.asarray(self.sigma), np.asarray(self.weight)

    def log_norm(self) -> float:
        knots = self.knots()
        if knots is None:
            return log_kernel_integral(*self.exponents())
        return quadrature_log_norm(*self.exponents(), knots)

    def density(self, sigma: float) -> float:
        """Normalised prior density at ``sigma``."""
        return math.exp(log_kernel(sigma, *self.exponents(), self.knots()) - self.log_norm())


# kernel (1+s)**a (1-s)**b g(s)

def _log_power(base: np.ndarray, exponent: float) -> np.ndarray:
    # continuous extension: 0**0 = 1
    if exponent == 0:
        return np.zeros_like(base)
    with np.errstate(divide="ignore"):
        return exponent * np.log(base)


def log_kernel(sigma, a: float, b: float, knots=None):
    s = np.asarray(sigma, dtype=float)
    out = _log_power(1.0 + s, a) + _log_power(1.0 - s, b)
    if knots is not None:
        ks, kw = knots
        g = np.interp(s, ks, kw, left=0.0, right=0.0)
        with np.errstate(divide="ignore"):
            out = out + np.log(g)
    return out if out.ndim else float(out)


def _log_beta_kernel(a: float, b: float) -> float:
    """log of integral over [-1, 1] of (1+s)**a (1-s)**b."""
    if a <= -1 or b <= -1:
        raise DegeneratePosteriorError("kernel is not integrable at an endpoint")
    big, small = max(a, b) + 1.0, min(a, b) + 1.0
    if big < _STIRLING_MIN:
        return (a + b + 1.0) * LOG2 + float(betaln(big, small))
    # Stirling forms with the power of two folded in; betaln loses ~1e-9 near 1e6
    s = big + small
    if small < _STIRLING_MIN:
        return (
            (s - 1.0) * LOG2
            + math.lgamma(small)
            + small
            + (big - 0.5) * math.log1p(-small / s)
            - small * math.log(s)
            + _stirling_tail(big)
            - _stirling_tail(s)
        )
    return (
        0.5 * math.log(2.0 * math.pi)
        + (big - 0.5) * math.log1p((big - small) / s)
        + (small - 0.5) * math.log1p((small - big) / s)
        - 0.5 * math.log(s)
        + _stirling_tail(big)
        + _stirling_tail(small)
        - _stirling_tail(s)
    )


def _stirling_tail(x: float) -> float:
    """lgamma(x) minus its leading Stirling terms."""
    x2 = x * x
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x


def _segment_moments(a: float, b: float, knots, order: int) -> np.ndarray:
    """Piecewise closed form for the tabulated kernel.

    Returns ``M[j] = integral of x**j g (1+s)**a (1-s)**b ds`` for
    ``j = 0..order`` with ``x = (1+s)/2``, each divided by
    ``2**(a+b+1) B(a+1, b+1)``.
    """
    ks, kw = knots
    xs = 0.5 * (1.0 + ks)
    # B(a+1+j, b+1) / B(a+1, b+1)
    ratios = [1.0]
    for j in range(1, order + 2):
        ratios.append(ratios[-1] * (a + j) / (a + b + j + 1.0))
    cdf = [betainc(a + 1.0 + j, b + 1.0, xs) for j in range(order + 2)]
    moments = np.zeros(order + 1)
    for i in range(len(ks) - 1):
        dx = xs[i + 1] - xs[i]
        slope = (kw[i + 1] - kw[i]) / dx
        intercept = kw[i] - slope * xs[i]
        for j in range(order + 1):
            m0 = ratios[j] * (cdf[j][i + 1] - cdf[j][i])
            m1 = ratios[j + 1] * (cdf[j + 1][i + 1] - cdf[j + 1][i])
            moments[j] += intercept * m0 + slope * m1
    return moments


def log_kernel_integral(a: float, b: float, knots=None) -> float:
    """Closed-form log normaliser of the kernel."""
    base = _log_beta_kernel(a, b)
    if knots is None:
        return base
    s0 = _segment_moments(a, b, knots, 0)[0]
    if not s0 > 0 or not math.isfinite(s0):
        raise DegeneratePosteriorError(
            "tabulated prior carries no weight where the likelihood is supported"
        )
    return base + math.log(s0)


def kernel_mean(a: float, b: float, knots=None) -> float:
    """Closed-form mean of sigma under the normalised kernel."""
    if knots is None:
        # sigma = 2x - 1 with x ~ Beta(a+1, b+1)
        return (a - b) / (a + b + 2.0)
    m = _segment_moments(a, b, knots, 1)
    if not m[0] > 0:
        raise DegeneratePosteriorError(
            "tabulated prior carries no weight where the likelihood is supported"
        )
    return 2.0 * m[1] / m[0] - 1.0


def _panel_breakpoints(a: float, b: float, knots=None) -> list:
    """Panel edges: the knots plus points where the kernel has fallen off."""
    pts = {-1.0, 1.0}
    if knots is not None:
        pts.update(float(k) for k in knots[0])
    if a >= 0 and b >= 0 and a + b > 0:
        mode = (a - b) / (a + b)
        peak = log_kernel(mode, a, b)
        pts.add(mode)
        eps = 1e-300
        for drop in _PANEL_DROPS:
            h = lambda s: log_kernel(s, a, b) - (peak - drop)  # noqa: E731
            for end in (-1.0 + eps, 1.0 - eps):
                lo, hi = sorted((mode, end))
                if lo < hi and h(end) < 0 < h(mode) + 1e-300:
                    pts.add(brentq(h, lo, hi, xtol=1e-15))
    return sorted(pts)


def quadrature_log_norm(a: float, b: float, knots=None, n: int = N_NODES) -> float:
    """Composite Gauss-Legendre log normaliser, ``n`` nodes per panel."""
    f = lambda s: log_kernel(s, a, b, knots)  # noqa: E731
    return log_integrate(f, _panel_breakpoints(a, b, knots), n)


def quadrature_mean(a: float, b: float, knots=None, n: int = N_NODES) -> float:
    """Composite Gauss-Legendre mean of sigma."""
    f = lambda s: log_kernel(s, a, b, knots)  # noqa: E731
    bp = _panel_breakpoints(a, b, knots)
    log_z = log_integrate(f, bp, n)
    if not math.isfinite(log_z):
        raise DegeneratePosteriorError("posterior normaliser underflowed")
    log_up = log_integrate(f, bp, n, moment=lambda s: 0.5 * (1.0 + s))
    return 2.0 * math.exp(log_up - log_z) - 1.0


@dataclass(frozen=True)
class Posterior:
    """Posterior density over ``sigma``, stored as prior plus counts.

    ``log_norm`` is the log of the Bayes denominator
    ``integral (1+s)**n_up (1-s)**n_down p0(s) ds`` with ``p0`` normalised.
    """

    prior: Prior
    data: CountData
    log_norm: float

    def exponents(self) -> Tuple[float, float]:
        a0, b0 = self.prior.exponents()
        return a0 + self.data.n_up, b0 + self.data.n_down

    def _log_kernel_norm(self) -> float:
        return self.log_norm + self.prior.log_norm()

    def density(self, sigma: float) -> float:
        return posterior_density_at(self, sigma)

    def mean(self) -> float:
        return posterior_mean(self)

    def std(self) -> float:
        """Posterior standard deviation of sigma (closed form for conjugate priors)."""
        a, b = self.exponents()
        knots = self.prior.knots()
        if knots is None:
            x_a, x_b = a + 1.0, b + 1.0
            var_x = x_a * x_b / ((x_a + x_b) ** 2 * (x_a + x_b + 1.0))
            return 2.0 * math.sqrt(var_x)
        m = _segment_moments(a, b, knots, 2)
        ex, ex2 = m[1] / m[0], m[2] / m[0]
        return 2.0 * math.sqrt(max(ex2 - ex * ex, 0.0))

    def as_prior(self) -> Prior:
        """This posterior, repackaged as a prior for further data."""
        p = self.prior
        if p.kind in ("uniform", "beta"):
            a, b = self.exponents()
            return Prior.beta_prior(a + 1.0, b + 1.0)
        return Prior(p.kind, sigma=p.sigma, weight=p.weight, tilt=p.tilt + self.data)


def posterior(prior: Prior, d: CountData) -> Posterior:
    """Update ``prior`` with counts ``d``.

    Raises
    ------
    DegeneratePosteriorError
        If the prior has no weight where the likelihood lives (for a
        tabulated prior this includes numerical underflow).
    """
    a0, b0 = prior.exponents()
    knots = prior.knots()
    if knots is None:
        log_post = log_kernel_integral(a0 + d.n_up, b0 + d.n_down)
    else:
        log_post = quadrature_log_norm(a0 + d.n_up, b0 + d.n_down, knots)
        if not math.isfinite(log_post):
            raise DegeneratePosteriorError(
                "tabulated prior carries no weight where the likelihood is supported"
            )
    return Posterior(prior, d, log_post - prior.log_norm())


def posterior_density_at(p: Posterior, sigma: float) -> float:
    if not -1.0 <= sigma <= 1.0:
        raise DomainError(f"sigma={sigma} outside [-1, 1]")
    a, b = p.exponents()
    return math.exp(log_kernel(sigma, a, b, p.prior.knots()) - p._log_kernel_norm())


def posterior_mean(p: Posterior) -> float:
    """Posterior mean of sigma.

    Closed form for uniform and beta priors; 128-node composite
    Gauss-Legendre for tabulated priors.
    """
    a, b = p.exponents()
    knots = p.prior.knots()
    if knots is None:
        return kernel_mean(a, b)
    return quadrature_mean(a, b, knots)


def mean_check(p: Posterior) -> Tuple[float, float]:
    """Posterior mean by the *other* route, and its residual against the primary.

    For conjugate priors the other route is quadrature; for tabulated priors
    it is the incomplete-Beta closed form.
    """
    a, b = p.exponents()
    knots = p.prior.knots()
    other = quadrature_mean(a, b) if knots is None else kernel_mean(a, b, knots)
    return other, abs(other - posterior_mean(p))


def _diag_from_mean(mean: float) -> DensityMatrix:
    return DensityMatrix(np.diag([0.5 * (1.0 + mean), 0.5 * (1.0 - mean)]).astype(complex))


def effective_density(p: Posterior) -> DensityMatrix:
    """Posterior average of ``diag((1+s)/2, (1-s)/2)``.

    Under the uniform prior this is ``diag(n_up+1, n_down+1) / (n+2)``.
    """
    a, b = p.exponents()
    if p.prior.knots() is None:
        # (a+1)/(a+b+2) directly keeps the uniform case exact
        up = (a + 1.0) / (a + b + 2.0)
        down = (b + 1.0) / (a + b + 2.0)
        return DensityMatrix(np.diag([up, down]).astype(complex))
    return _diag_from_mean(posterior_mean(p))


def effective_density_quadrature(p: Posterior) -> DensityMatrix:
    """Same average, evaluated by composite Gauss-Legendre quadrature."""
    a, b = p.exponents()
    return _diag_from_mean(quadrature_mean(a, b, p.prior.knots()))


@dataclass(frozen=True)
class HypothesisState:
    """Prior belief in a hypothesis and the likelihood of data under it and its negation."""

    p_h: float
    like_h: float
    like_not_h: float

    def __post_init__(self):
        for name in ("p_h", "like_h", "like_not_h"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name}={v} outside [0, 1]")
            object.__setattr__(self, name, v)


def hypothesis_update(h: HypothesisState, n_repeats: int) -> float:
    """Belief in ``H`` after ``n_repeats`` independent repetitions.

    Returns ``1 / (1 + A_n)`` with
    ``A_n = (P[D|~H] / P[D|H])**n * (1 - P[H]) / P[H]``.
    A belief of exactly 0 or 1 never moves.
    """
    if n_repeats < 1 or int(n_repeats) != n_repeats:
        raise DomainError("n_repeats must be a positive integer")
    if h.like_h == 0.0 and h.like_not_h == 0.0:
        raise DomainError("both likelihoods are zero")
    if h.p_h in (0.0, 1.0):
        return h.p_h
    if h.like_h == 0.0:
        return 0.0
    if h.like_not_h == 0.0:
        return 1.0
    log_a = (
        n_repeats * (math.log(h.like_not_h) - math.log(h.like_h))
        + math.log1p(-h.p_h)
        - math.log(h.p_h)
    )
    # 1 / (1 + e^x), stable for either sign of x
    if log_a > 0:
        e = math.exp(-log_a)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(log_a))
