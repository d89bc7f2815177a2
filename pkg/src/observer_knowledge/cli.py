"""Command-line driver.

Subcommands: ``simulate``, ``estimate``, ``merge``, ``check``, ``witness``.

Exit codes are part of the interface:

    0   success, state physical
    2   input error (bad schema, non-Hermitian matrix, wrong axes)
    3   degenerate prior
    10  the resulting or checked matrix is unphysical
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional


from . import __version__
from .bayes import (
    CountData,
    Prior,
    effective_density,
    mean_check,
    posterior,
    posterior_mean,
)
from .density import EIG_FLOOR, HERM_TOL, DensityMatrix, frobenius, commutator, physicality
from .errors import DegeneratePosteriorError, KnowledgeError
from .merge import (
    ObserverRecord,
    merge_noncommuting,
    merge_subsystems,
    noncommuting_entries,
    product_criterion,
)
from .serialize import (
    SchemaError,
    counts_from_json,
    counts_to_json,
    density_from_json,
    density_to_json,
    dumps,
    load_json,
    merge_report_to_json,
    prior_from_json,
    prior_to_json,
    scenario_from_json,
    witness_to_json,
)
from .simulator import Simulator, SourceSpec
from .violations import find_witness, inject_offdiagonal

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_UNPHYSICAL = 10


def _emit(doc, out: Optional[str]) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_counts(spec: str):
    """``path`` or ``path#k`` to pick entry ``k`` from a list of records."""
    path, _, index = spec.partition("#")
    doc = load_json(path)
    if isinstance(doc, list):
        k = int(index) if index else 0
        if not 0 <= k < len(doc):
            raise SchemaError(spec, f"no record {k} in a list of {len(doc)}")
        return counts_from_json(doc[k], f"{path}[{k}]")
    return counts_from_json(doc, path)


def _load_density(path: str, tol: float) -> DensityMatrix:
    return density_from_json(load_json(path), herm_tol=tol, eig_floor=min(EIG_FLOOR, -tol / 10))


def cmd_simulate(args) -> int:
    src, runs = scenario_from_json(load_json(args.scenario))
    if args.seed is not None:
        src = SourceSpec(src.truth, src.nuclear, args.seed, src.label)
    sim = Simulator(src)
    records = []
    for run in runs:
        if run.first_axis is None:
            d = sim.sample_counts(run.axis, run.n, run.detector)
        else:
            d = sim.sequential_run(run.first_axis, run.keep, run.axis, run.n, run.detector)
        records.append(counts_to_json(run.axis, d))
    _emit(records, args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    rec = _load_counts(args.counts)
    prior = prior_from_json(load_json(args.prior)) if args.prior else Prior.uniform()
    post = posterior(prior, rec.counts)
    rho = effective_density(post)
    mean = posterior_mean(post)
    other, residual = mean_check(post)
    doc = {
        "counts": counts_to_json(rec.axis, rec.counts),
        "prior": prior_to_json(prior),
        "effective_density": density_to_json(rho),
        "posterior_mean": mean,
        "posterior_std": post.std(),
        "log_norm": post.log_norm,
        "route": "closed-form" if prior.kind != "tabulated" else "quadrature",
        "check_mean": other,
        "residual": residual,
    }
    _emit(doc, args.out)
    if args.plot:
        from .plotting import plot_posterior

        plot_posterior(post, args.plot)
    return EXIT_OK


def cmd_merge(args) -> int:
    a, b = _load_counts(args.first), _load_counts(args.second)
    if args.mode == "noncommuting":
        if (a.axis, b.axis) != ("z", "x"):
            raise SchemaError("axis", f"noncommuting mode needs z then x counts, got {a.axis}, {b.axis}")
        report = merge_noncommuting(
            ObserverRecord("Z", "z", a.counts), ObserverRecord("X", "x", b.counts)
        )
    else:
        if a.axis not in ("x", "y", "z", "electron") or b.axis != "nuclear":
            raise SchemaError(
                "axis", f"commuting mode needs electron then nuclear counts, got {a.axis}, {b.axis}"
            )
        report = merge_subsystems(
            ObserverRecord("E", "electron", a.counts), ObserverRecord("N", "nuclear", b.counts)
        )
    _emit(merge_report_to_json(report), args.out)
    if args.plot:
        from .plotting import plot_merge

        plot_merge(report, args.plot)
    return EXIT_OK if report.physical else EXIT_UNPHYSICAL


def _single_check(rho: DensityMatrix) -> dict:
    v = physicality(rho)
    return {
        "verdict": str(v),
        "min_eigenvalue": v.min_eigenvalue,
        "eigenvalues": rho.eigenvalues().tolist(),
        "witness": witness_to_json(find_witness(rho)),
    }


def cmd_check(args) -> int:
    rho = _load_density(args.matrix, args.tol)
    if args.inject:
        rec = _load_counts(args.inject)
        dx = float(noncommuting_entries(CountData(0, 0), rec.counts)[2])
        i, j = args.pair
        rho, verdict = inject_offdiagonal(rho, dx, i, j)
        doc = {"injected": {"element": dx, "i": i, "j": j}, "matrix": density_to_json(rho)}
        doc.update(_single_check(rho))
        doc["verdict"] = str(verdict)
        _emit(doc, args.out)
        return EXIT_OK if verdict.physical else EXIT_UNPHYSICAL
    if args.other is None:
        doc = _single_check(rho)
        _emit(doc, args.out)
        return EXIT_OK if doc["verdict"] == "physical" else EXIT_UNPHYSICAL
    other = _load_density(args.other, args.tol)
    pv = product_criterion(rho, other)
    doc = {
        "commutator_norm": frobenius(commutator(rho.matrix, other.matrix)),
        "product": str(pv),
        "product_norm": pv.product_norm,
        "warning": pv.warning,
        "first": _single_check(rho),
        "second": _single_check(other),
    }
    _emit(doc, args.out)
    return EXIT_OK


def cmd_witness(args) -> int:
    rho = _load_density(args.matrix, args.tol)
    w = find_witness(rho)
    _emit(witness_to_json(w), args.out)
    return EXIT_OK if w is None else EXIT_UNPHYSICAL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS so a flag given before the subcommand is not reset by the subparser
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override the scenario seed (u64)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write JSON here instead of stdout")
    common.add_argument(
        "--tol", type=float, default=argparse.SUPPRESS, help="Hermitian/trace tolerance for input matrices"
    )

    parser = argparse.ArgumentParser(
        prog="observer-knowledge",
        description="Observer-knowledge density matrices: simulate, estimate, merge, check.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="generate Stern-Gerlach counts")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="Bayesian effective density matrix")
    p.add_argument("counts", help="counts JSON (path or path#index)")
    p.add_argument("--prior", default=None, help="prior JSON; uniform if omitted")
    p.add_argument("--plot", default=None, help="write a posterior figure here")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("merge", parents=[common], help="combine two observers")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--mode", choices=("noncommuting", "commuting"), required=True)
    p.add_argument("--plot", default=None, help="write a merge figure here")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("check", parents=[common], help="physicality and product checks")
    p.add_argument("matrix")
    p.add_argument("other", nargs="?", default=None)
    p.add_argument("--inject", default=None, help="x-axis counts whose coherence is injected")
    p.add_argument("--pair", type=int, nargs=2, default=(0, 1), metavar=("I", "J"))
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("witness", parents=[common], help="uncertainty-violation witness")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("seed", None), ("out", None), ("tol", HERM_TOL)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except DegeneratePosteriorError as exc:
        print(f"error: degenerate prior: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (KnowledgeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
