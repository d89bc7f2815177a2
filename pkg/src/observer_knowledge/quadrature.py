"""Composite Gauss-Legendre integration in log space."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

N_NODES = 128


@lru_cache(maxsize=8)
def legendre_rule(n: int = N_NODES):
    """Nodes and weights on [-1, 1]; cached because ``leggauss`` is O(n^2)."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(lo: float, hi: float, n: int = N_NODES):
    x, w = legendre_rule(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def log_integrate(
    log_f: Callable[[np.ndarray], np.ndarray],
    breakpoints: Sequence[float],
    n: int = N_NODES,
    moment: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """``log of sum over panels of integral of exp(log_f) * moment``.

    ``breakpoints`` must be sorted; each consecutive pair is one panel with
    ``n`` nodes. ``moment`` must be positive where it is used.
    """
    terms = []
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi <= lo:
            continue
        s, w = panel_nodes(lo, hi, n)
        lf = log_f(s)
        if moment is not None:
            with np.errstate(divide="ignore"):
                lf = lf + np.log(moment(s))
        terms.append(lf + np.log(w))
    if not terms:
        return -np.inf
    with np.errstate(divide="ignore"):
        return float(logsumexp(np.concatenate(terms)))
