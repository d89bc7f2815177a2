"""Synthetic Stern-Gerlach count data.

Each atom carries an electron spin and, optionally, a nuclear spin in a
product state. Measuring an axis yields up with probability
``(1 + <sigma_axis>) / 2``. A detector then records an up atom with
probability ``eff_up`` and a down atom with ``eff_down``. Missed atoms vanish
without trace.

Atoms are sampled one by one (vectorised) so that post-selection and detector
loss compose. A :class:`Simulator` owns its random stream; give each parallel
run its own instance and seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bayes import CountData
from .density import BlochVector
from .errors import DomainError, UsageError

ELECTRON_AXES = ("x", "y", "z")
AXES = ELECTRON_AXES + ("nuclear",)


@dataclass(frozen=True)
class SourceSpec:
    """Ground-truth spin state of a source of atoms."""

    truth: BlochVector
    nuclear: Optional[BlochVector] = None
    seed: int = 0
    label: str = ""

    def __post_init__(self):
        for part in (self.truth, self.nuclear):
            if part is not None and part.length > 1.0 + 1e-12:
                raise DomainError(f"Bloch vector {part.as_tuple()} is longer than 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class DetectorSpec:
    eff_up: float = 1.0
    eff_down: float = 1.0

    def __post_init__(self):
        for name in ("eff_up", "eff_down"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name}={v} outside [0, 1]")
            object.__setattr__(self, name, v)


PERFECT = DetectorSpec()


def _check_axis(axis: str) -> None:
    if axis not in AXES:
        raise DomainError(f"unknown axis {axis!r}; expected one of {AXES}")


class Simulator:
    """Stateful sampler bound to one source."""

    def __init__(self, src: SourceSpec):
        self.src = src
        self.rng = np.random.Generator(np.random.PCG64(int(src.seed)))

    @staticmethod
    def _up_probability(axis: str, electron: BlochVector, nuclear: Optional[BlochVector]) -> float:
        if axis == "nuclear":
            if nuclear is None:
                raise UsageError("source has no nuclear spin to measure")
            return 0.5 * (1.0 + nuclear.sz)
        return 0.5 * (1.0 + electron.component(axis))

    def _detect(self, up: np.ndarray, det: DetectorSpec) -> CountData:
        seen = self.rng.random(up.size) < np.where(up, det.eff_up, det.eff_down)
        n_up = int(np.count_nonzero(up & seen))
        n_down = int(np.count_nonzero(~up & seen))
        return CountData(n_up, n_down)

    def sample_counts(self, axis: str, n_atoms: int, det: DetectorSpec = PERFECT) -> CountData:
        _check_axis(axis)
        if n_atoms < 0:
            raise DomainError("n_atoms must be non-negative")
        if n_atoms == 0:
            return CountData(0, 0)
        p = self._up_probability(axis, self.src.truth, self.src.nuclear)
        up = self.rng.random(n_atoms) < p
        return self._detect(up, det)

    def sequential_run(
        self,
        first_axis: str,
        keep: str,
        second_axis: str,
        n_atoms: int,
        det: DetectorSpec = PERFECT,
    ) -> CountData:
        """Post-select on ``first_axis`` then count on ``second_axis``.

        Only the ``keep`` branch of the first apparatus proceeds. Its electron
        (or nuclear) spin collapses to the matching eigenstate; the other
        subsystem is untouched. The first stage is ideal; ``det`` applies to
        the second.
        """
        _check_axis(first_axis)
        _check_axis(second_axis)
        if keep not in ("up", "down"):
            raise DomainError(f"keep must be 'up' or 'down', got {keep!r}")
        if n_atoms < 0:
            raise DomainError("n_atoms must be non-negative")
        if n_atoms == 0:
            return CountData(0, 0)
        p1 = self._up_probability(first_axis, self.src.truth, self.src.nuclear)
        first_up = self.rng.random(n_atoms) < p1
        survivors = int(np.count_nonzero(first_up if keep == "up" else ~first_up))
        sign = 1.0 if keep == "up" else -1.0

        electron, nuclear = self.src.truth, self.src.nuclear
        if first_axis == "nuclear":
            nuclear = BlochVector(0.0, 0.0, sign)
        else:
            comps = {a: 0.0 for a in ELECTRON_AXES}
            comps[first_axis] = sign
            electron = BlochVector(comps["x"], comps["y"], comps["z"])
        p2 = self._up_probability(second_axis, electron, nuclear)
        up = self.rng.random(survivors) < p2
        return self._detect(up, det)


def sample_counts(
    src: SourceSpec, axis: str, n_atoms: int, det: DetectorSpec = PERFECT
) -> CountData:
    """One-shot sampling with a fresh stream seeded from ``src``."""
    return Simulator(src).sample_counts(axis, n_atoms, det)


def sequential_run(
    src: SourceSpec,
    first_axis: str,
    keep: str,
    second_axis: str,
    n_atoms: int,
    det: DetectorSpec = PERFECT,
) -> CountData:
    return Simulator(src).sequential_run(first_axis, keep, second_axis, n_atoms, det)
