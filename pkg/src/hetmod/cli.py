"""Command-line front end.

Subcommands operate on a built-in model name or a model JSON file and emit a
deterministic JSON report (keys sorted, stable ordering).  Exit status: 0 when
every check in the report passes, 1 when some check fails, 2 on usage errors,
unknown models or malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import chartlocal, cohomology
from .geometry import HomogeneousModel, ModelError
from .models import BUILTIN_NAMES, builtin_model, parse_model_file
from .scalars import GaussRat, ScalarError


def _load_model(spec: str) -> HomogeneousModel:
    if spec in BUILTIN_NAMES:
        return builtin_model(spec)
    if os.path.exists(spec):
        return parse_model_file(spec)
    raise ModelError(
        f"unknown model {spec!r}: not a built-in "
        f"({', '.join(BUILTIN_NAMES)}) and not a file")


def _parse_alpha(text: Optional[str]) -> Optional[GaussRat]:
    if text is None:
        return None
    try:
        return GaussRat.of(text)
    except (ScalarError, ValueError) as exc:
        raise ModelError(f"bad --alpha-prime value {text!r}: {exc}")


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_check(args) -> int:
    m = _load_model(args.model)
    report = cohomology.system_report(m, _parse_alpha(args.alpha_prime))
    _emit(report, args.out)
    return 0 if report["passed"] else 1


def _run_cohomology(args) -> int:
    m = _load_model(args.model)
    report = cohomology.cohomology_report(
        m, _parse_alpha(args.alpha_prime),
        symbol_limit=args.samples, diagonal=args.diagonal_dbar)
    _emit(report, args.out)
    return 0 if report["symbol"]["injective"] else 1


def _run_serre(args) -> int:
    m = _load_model(args.model)
    report = {"model": m.name}
    report.update(cohomology.serre_report(m, _parse_alpha(args.alpha_prime)))
    _emit(report, args.out)
    return 0 if report["symmetric"] else 1


def _run_symbol(args) -> int:
    m = _load_model(args.model)
    a0 = _parse_alpha(args.alpha_prime)
    if a0 is None:
        a0 = m.alpha_prime if m.alpha_prime is not None else GaussRat.of(1)
    report = {"model": m.name, "alpha_prime": str(a0)}
    report.update(cohomology.injectivity_scan(m, a0, limit=args.samples))
    _emit(report, args.out)
    return 0 if report["injective"] else 1


def _run_trivialize(args) -> int:
    m = _load_model(args.model)
    report = chartlocal.trivialization_report(
        m, degree=args.degree, alpha0=_parse_alpha(args.alpha_prime))
    _emit(report, args.out)
    ok = (all(report["potentials"].values())
          and report["chern_simons_transgression"]
          and report["operator_identity"]["passed"]
          and report["transitions"]["holomorphic"]
          and report["transitions"]["cocycle"])
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetmod",
        description="Exact invariant computations for the deformation "
                    "operator of coupled metric-bundle systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, degree=False, diagonal=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("model",
                       help="built-in model name or model JSON file")
        p.add_argument("--alpha-prime", metavar="p/q", default=None,
                       help="coupling constant (rational, e.g. -4 or 1/7)")
        p.add_argument("--samples", type=int, default=None, metavar="N",
                       help="cap on cotangent samples for the symbol scan")
        p.add_argument("--out", metavar="report.json", default=None,
                       help="write the JSON report to a file")
        if degree:
            p.add_argument("--degree", type=int, default=3, metavar="D",
                           help="polynomial degree bound for section checks")
        if diagonal:
            p.add_argument("--diagonal-dbar", action="store_true",
                           help="drop the couplings and use the diagonal "
                                "Dolbeault operator")
        p.set_defaults(func=func)
        return p

    add("check", _run_check,
        "verify the coupled torsion and anomaly conditions")
    add("cohomology", _run_cohomology,
        "invariant cohomology and harmonic dimensions", diagonal=True)
    add("serre", _run_serre, "duality symmetry of the dimensions")
    add("symbol", _run_symbol, "principal symbol injectivity scan")
    add("trivialize", _run_trivialize,
        "local triangular trivialization on a polynomial chart",
        degree=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (ModelError, ScalarError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
