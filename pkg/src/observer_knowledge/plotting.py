"""Report figures written next to the JSON output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bayes import Posterior  # noqa: E402
from .merge import MergeReport  # noqa: E402

plt.rcParams["savefig.bbox"] = "tight"
plt.rcParams["figure.dpi"] = 120
# fixed metadata so reruns produce identical files
_SAVE_META = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}


def _save(fig, path) -> None:
    ext = str(path).rsplit(".", 1)[-1].lower()
    fig.savefig(path, metadata=_SAVE_META.get(ext))
    plt.close(fig)


def plot_posterior(p: Posterior, path, n_points: int = 801) -> None:
    """Posterior density over sigma with its mean marked."""
    s = np.linspace(-1.0, 1.0, n_points)
    dens = np.array([p.density(v) for v in s])
    mean = p.mean()
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(s, dens, color="k", lw=1.2, label="posterior")
    ax.plot(s, [p.prior.density(v) for v in s], color="0.6", ls="--", lw=1.0, label="prior")
    ax.axvline(mean, color="C3", lw=1.0, label=f"mean = {mean:.4f}")
    ax.set_xlim(-1, 1)
    ax.set_xlabel(r"$\sigma = \langle\sigma_z\rangle$")
    ax.set_ylabel(r"$p(\sigma\mid D)$")
    ax.set_title(f"n_up = {p.data.n_up}, n_down = {p.data.n_down}")
    ax.legend(frameon=False, fontsize=8)
    _save(fig, path)


def plot_merge(r: MergeReport, path) -> None:
    """Merged state in the x-z plane of the Bloch ball.

    Points outside the unit circle are unphysical.
    """
    m = r.merged.matrix
    if m.shape != (2, 2):
        _plot_spectrum(r, path)
        return
    sx = 2.0 * m[0, 1].real
    sz = (m[0, 0] - m[1, 1]).real
    t = np.linspace(0, 2 * np.pi, 361)
    fig, ax = plt.subplots(figsize=(4.0, 4.0))
    ax.plot(np.cos(t), np.sin(t), color="k", lw=1.0)
    colour = "C2" if r.physical else "C3"
    ax.plot([sx], [sz], "o", color=colour, label=f"merged ({r.verdict})")
    ax.axhline(0, color="0.8", lw=0.5)
    ax.axvline(0, color="0.8", lw=0.5)
    ax.set_aspect("equal")
    lim = max(1.1, abs(sx) * 1.1, abs(sz) * 1.1)
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_xlabel(r"$\langle\sigma_x\rangle$")
    ax.set_ylabel(r"$\langle\sigma_z\rangle$")
    ax.legend(frameon=False, fontsize=8, loc="lower left")
    _save(fig, path)


def _plot_spectrum(r: MergeReport, path) -> None:
    vals = r.merged.eigenvalues()
    fig, ax = plt.subplots(figsize=(4.5, 3.0))
    ax.bar(np.arange(vals.size), vals, color=["C3" if v < 0 else "C0" for v in vals])
    ax.axhline(0, color="k", lw=0.8)
    ax.set_xlabel("eigenvalue index")
    ax.set_ylabel("eigenvalue")
    ax.set_title(str(r.verdict))
    _save(fig, path)
