"""JSON encoding of the toolkit's value types.

Formats
-------
matrix      {"dim": N, "re": [[...]], "im": [[...]]}
table       {"dim": N, "p": [...], "dx": [...], "dy": [...]}
counts      {"axis": "z"|"x"|"y"|"nuclear"|"electron", "n_up": int, "n_down": int}
prior       {"kind": "uniform"} | {"kind": "beta", "alpha": a, "beta": b}
            | {"kind": "tabulated", "sigma": [...], "weight": [...]}
merge       {"merged": matrix, "commutator_norm": float, "product_nonzero": bool,
             "min_eigenvalue": float, "verdict": "physical"|"unphysical"}
witness     {"deficit": float, "lhs": float, "rhs": float, "obs_a": matrix, "obs_b": matrix}
scenario    {"truth": {"electron": [sx, sy, sz], "nuclear": [...] | null},
             "seed": int, "runs": [{"axis", "n", "eff_up", "eff_down"}, ...]}

A run may add ``"first_axis"`` and ``"keep"`` to post-select on a first
apparatus before counting on ``"axis"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .bayes import CountData, Prior
from .density import (
    EIG_FLOOR,
    HERM_TOL,
    BlochVector,
    DensityMatrix,
    ProbabilityTable,
)
from .errors import KnowledgeError
from .merge import MergeReport
from .simulator import AXES as SIM_AXES
from .simulator import DetectorSpec, SourceSpec
from .violations import ViolationWitness

COUNT_AXES = ("z", "x", "y", "nuclear", "electron")


class SchemaError(KnowledgeError):
    """A JSON document does not match its schema; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _require(doc: Dict[str, Any], key: str, where: str):
    if not isinstance(doc, dict):
        raise SchemaError(where, "expected a JSON object")
    if key not in doc:
        raise SchemaError(f"{where}.{key}", "missing field")
    return doc[key]


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(field, f"expected a number, got {value!r}")
    return float(value)


def _integer(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(field, f"expected an integer, got {value!r}")
    return value


def _number_list(value, field: str) -> List[float]:
    if not isinstance(value, list):
        raise SchemaError(field, "expected a list")
    return [_number(v, f"{field}[{i}]") for i, v in enumerate(value)]


# matrices


def matrix_to_json(m) -> Dict[str, Any]:
    a = np.asarray(m, dtype=complex)
    return {"dim": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(doc, where: str = "matrix") -> np.ndarray:
    dim = _integer(_require(doc, "dim", where), f"{where}.dim")
    re = _require(doc, "re", where)
    im = doc.get("im", [[0.0] * dim for _ in range(dim)])
    rows = []
    for name, part in (("re", re), ("im", im)):
        if not isinstance(part, list) or len(part) != dim:
            raise SchemaError(f"{where}.{name}", f"expected {dim} rows")
        rows.append([_number_list(r, f"{where}.{name}[{i}]") for i, r in enumerate(part)])
        if any(len(r) != dim for r in rows[-1]):
            raise SchemaError(f"{where}.{name}", f"expected {dim} columns per row")
    return np.array(rows[0]) + 1j * np.array(rows[1])


def density_to_json(rho: DensityMatrix) -> Dict[str, Any]:
    return matrix_to_json(rho.matrix)


def density_from_json(doc, herm_tol: float = HERM_TOL, eig_floor: float = EIG_FLOOR) -> DensityMatrix:
    return DensityMatrix(matrix_from_json(doc), herm_tol, eig_floor)


def table_to_json(t: ProbabilityTable) -> Dict[str, Any]:
    return {
        "dim": t.dim,
        "p": t.p_diag.tolist(),
        "dx": t.delta_x.tolist(),
        "dy": t.delta_y.tolist(),
    }


def table_from_json(doc) -> ProbabilityTable:
    dim = _integer(_require(doc, "dim", "table"), "table.dim")
    p = _number_list(_require(doc, "p", "table"), "table.p")
    if len(p) != dim:
        raise SchemaError("table.p", f"expected {dim} entries")
    dx = _number_list(_require(doc, "dx", "table"), "table.dx")
    dy = _number_list(_require(doc, "dy", "table"), "table.dy")
    return ProbabilityTable(p, dx, dy)


# counts and priors


@dataclass(frozen=True)
class AxisCounts:
    """Counts tagged with the axis (or subsystem) they were taken on."""

    axis: str
    counts: CountData


def counts_to_json(axis: str, d: CountData) -> Dict[str, Any]:
    return {"axis": axis, "n_up": d.n_up, "n_down": d.n_down}


def counts_from_json(doc, where: str = "counts") -> AxisCounts:
    axis = _require(doc, "axis", where)
    if axis not in COUNT_AXES:
        raise SchemaError(f"{where}.axis", f"expected one of {COUNT_AXES}, got {axis!r}")
    n_up = _integer(_require(doc, "n_up", where), f"{where}.n_up")
    n_down = _integer(_require(doc, "n_down", where), f"{where}.n_down")
    if n_up < 0 or n_down < 0:
        raise SchemaError(where, "counts must be non-negative")
    return AxisCounts(axis, CountData(n_up, n_down))


def prior_to_json(p: Prior) -> Dict[str, Any]:
    if p.kind == "uniform":
        return {"kind": "uniform"}
    if p.kind == "beta":
        return {"kind": "beta", "alpha": p.alpha, "beta": p.beta}
    return {"kind": "tabulated", "sigma": list(p.sigma), "weight": list(p.weight)}


def prior_from_json(doc) -> Prior:
    kind = _require(doc, "kind", "prior")
    if kind == "uniform":
        return Prior.uniform()
    if kind == "beta":
        a = _number(_require(doc, "alpha", "prior"), "prior.alpha")
        b = _number(_require(doc, "beta", "prior"), "prior.beta")
        if a <= 0 or b <= 0:
            raise SchemaError("prior.alpha", "alpha and beta must be positive")
        return Prior.beta_prior(a, b)
    if kind == "tabulated":
        s = _number_list(_require(doc, "sigma", "prior"), "prior.sigma")
        w = _number_list(_require(doc, "weight", "prior"), "prior.weight")
        return Prior.tabulated(s, w)
    raise SchemaError("prior.kind", f"unknown prior kind {kind!r}")


# reports


def merge_report_to_json(r: MergeReport) -> Dict[str, Any]:
    return {
        "merged": density_to_json(r.merged),
        "commutator_norm": r.commutator_norm,
        "product_nonzero": r.product_nonzero,
        "min_eigenvalue": r.verdict.min_eigenvalue,
        "verdict": str(r.verdict),
    }


def witness_to_json(w: Optional[ViolationWitness]) -> Optional[Dict[str, Any]]:
    if w is None:
        return None
    return {
        "deficit": w.deficit,
        "lhs": w.lhs,
        "rhs": w.rhs,
        "obs_a": matrix_to_json(w.obs_a),
        "obs_b": matrix_to_json(w.obs_b),
    }


# scenarios


@dataclass(frozen=True)
class Run:
    axis: str
    n: int
    detector: DetectorSpec
    first_axis: Optional[str] = None
    keep: str = "up"


def _bloch(value, field: str) -> BlochVector:
    comps = _number_list(value, field)
    if len(comps) != 3:
        raise SchemaError(field, "expected three components")
    try:
        return BlochVector(*comps)
    except KnowledgeError as exc:
        raise SchemaError(field, str(exc)) from None


def scenario_from_json(doc) -> Tuple[SourceSpec, List[Run]]:
    truth = _require(doc, "truth", "scenario")
    electron = _bloch(_require(truth, "electron", "scenario.truth"), "scenario.truth.electron")
    nuc_doc = truth.get("nuclear") if isinstance(truth, dict) else None
    nuclear = None if nuc_doc is None else _bloch(nuc_doc, "scenario.truth.nuclear")
    seed = _integer(_require(doc, "seed", "scenario"), "scenario.seed")
    if not 0 <= seed < 2**64:
        raise SchemaError("scenario.seed", "expected an unsigned 64-bit integer")
    runs_doc = _require(doc, "runs", "scenario")
    if not isinstance(runs_doc, list):
        raise SchemaError("scenario.runs", "expected a list")
    runs = []
    for i, r in enumerate(runs_doc):
        where = f"scenario.runs[{i}]"
        axis = _require(r, "axis", where)
        if axis not in SIM_AXES:
            raise SchemaError(f"{where}.axis", f"expected one of {SIM_AXES}, got {axis!r}")
        n = _integer(_require(r, "n", where), f"{where}.n")
        if n < 0:
            raise SchemaError(f"{where}.n", "must be non-negative")
        effs = []
        for key in ("eff_up", "eff_down"):
            v = _number(r.get(key, 1.0), f"{where}.{key}")
            if not 0.0 <= v <= 1.0:
                raise SchemaError(f"{where}.{key}", "must lie in [0, 1]")
            effs.append(v)
        first = r.get("first_axis")
        if first is not None and first not in SIM_AXES:
            raise SchemaError(f"{where}.first_axis", f"expected one of {SIM_AXES}")
        keep = r.get("keep", "up")
        if keep not in ("up", "down"):
            raise SchemaError(f"{where}.keep", "expected 'up' or 'down'")
        if axis == "nuclear" or first == "nuclear":
            if nuclear is None:
                raise SchemaError(f"{where}.axis", "nuclear run needs truth.nuclear")
        runs.append(Run(axis, n, DetectorSpec(*effs), first, keep))
    label = doc.get("label", "")
    for name, part in (("electron", electron), ("nuclear", nuclear)):
        if part is not None and part.length > 1.0 + 1e-12:
            raise SchemaError(f"scenario.truth.{name}", f"Bloch vector {part.as_tuple()} is longer than 1")
    return SourceSpec(electron, nuclear, seed, str(label)), runs


def load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise SchemaError(str(path), "file not found") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(str(path), f"invalid JSON ({exc})") from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"
