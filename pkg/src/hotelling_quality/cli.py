"""Command-line front end: ``solve``, ``verify``, ``sweep`` and ``threshold``.

Exit status is 0 on success, 1 when a verification fails and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .model import Preferences, indifferent_point
from .optimize import DEFAULT_RESOLUTION, DEFAULT_TOL, SolveReport, solve
from .theorems import (
    VerificationResult,
    detect_threshold,
    sweep_theta,
    verify_lemma_boundary,
    verify_remark,
    verify_theorem1,
    verify_theorem2,
)

SWEEP_HEADER = ["theta", "a", "b", "q", "jhat", "welfare", "regime"]


def num(x):
    """Round to 15 significant digits; non-finite values become ``None``."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.15g}")


def fmt(x) -> str:
    return f"{float(x):.15g}"


def _solve_rows(report: SolveReport) -> list[list]:
    rows = []
    for o in report.optima:
        c = o.config
        rows.append([report.prefs.theta, c.a, c.b, c.q, indifferent_point(c, report.prefs).jhat, o.welfare, report.regime])
    return rows


def _solve_payload(report: SolveReport) -> tuple[dict, dict]:
    prefs = report.prefs
    result = {
        "optima": [[num(v) for v in o.config.as_tuple()] for o in report.optima],
        "families": [o.family.value for o in report.optima],
        "jhat": [num(indifferent_point(o.config, prefs).jhat) for o in report.optima],
        "welfare": num(report.welfare_star),
        "regime": report.regime,
        "structure": report.structure.value,
    }
    diagnostics = {
        "oracle_config": [num(v) for v in report.oracle_config.as_tuple()],
        "oracle_welfare": num(report.oracle_welfare),
        "agreement": num(report.agreement),
        "refined_config": [num(v) for v in report.refined.config.as_tuple()],
        "refine_converged": report.refined.converged,
        "free_ranges": [
            None if o.free_range is None else [num(v) for v in o.free_range] for o in report.optima
        ],
    }
    return result, diagnostics


def _verify_payload(results: list[VerificationResult]) -> tuple[dict, dict]:
    passed = all(r.passed for r in results)
    worst = max(results, key=lambda r: r.max_discrepancy)
    result = {
        "status": "PASSED" if passed else "FAILED",
        "passed": passed,
        "max_discrepancy": num(worst.max_discrepancy),
        "runs": len(results),
    }
    diagnostics = {
        "checks": [
            {
                "claim": r.claim.value,
                "theta": num(r.theta),
                "gamma": num(r.gamma),
                "passed": r.passed,
                "checks": {k: [num(o), num(t)] for k, (o, t) in r.checks.items()},
            }
            for r in results
        ]
    }
    return result, diagnostics


def _emit_json(command: str, params: dict, result: dict, diagnostics: dict) -> str:
    doc = {"command": command, "params": params, "result": result, "diagnostics": diagnostics}
    return json.dumps(doc, indent=2) + "\n"


def _emit_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, int, np.floating)) and not isinstance(v, bool) else v for v in row])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=float, help="quality exponent (default 1.0; 0.5 for theorem2)")
    common.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION, help="lattice points per axis")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="hotelling-quality",
        description="Welfare-maximising location and quality of two public facilities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="find the social optimum")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("verify", parents=[common], help="check a closed-form claim")
    p.add_argument("claim", choices=["theorem1", "theorem2", "remark", "lemma"])
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--a", type=float, help="remark: single location (default: 101-point grid)")
    p.add_argument("--samples", type=int, default=200, help="lemma: boundary samples")

    p = sub.add_parser("sweep", parents=[common], help="solve over a theta grid")
    p.add_argument("--theta-min", type=float, required=True)
    p.add_argument("--theta-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("threshold", parents=[common], help="locate a regime change in theta")
    p.add_argument("--bracket", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--tol", type=float, default=1e-4, help="bisection tolerance on theta")
    return parser


def _resolve_gamma(args) -> None:
    fixed = {"theorem1": 1.0, "theorem2": 0.5}.get(getattr(args, "claim", None))
    if fixed is None:
        args.gamma = 1.0 if args.gamma is None else args.gamma
    elif args.gamma is None:
        args.gamma = fixed
    elif args.gamma != fixed:
        raise ValueError(f"{args.claim} is stated for gamma={fixed}, got {args.gamma}")


def _run(args) -> tuple[str, int]:
    _resolve_gamma(args)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "command")}
    if args.command == "solve":
        report = solve(Preferences(args.theta, args.gamma), args.resolution, args.tol)
        if args.format == "csv":
            return _emit_csv(SWEEP_HEADER, _solve_rows(report)), 0
        return _emit_json("solve", params, *_solve_payload(report)), 0

    if args.command == "verify":
        if args.claim == "theorem1":
            results = [verify_theorem1(args.theta, args.resolution, args.tol)]
        elif args.claim == "theorem2":
            results = [verify_theorem2(args.theta, args.resolution, args.tol)]
        elif args.claim == "remark":
            prefs = Preferences(args.theta, args.gamma)
            grid = [args.a] if args.a is not None else [i / 100 for i in range(101)]
            results = [verify_remark(a, prefs) for a in grid]
        else:
            prefs = Preferences(args.theta, args.gamma)
            results = [verify_lemma_boundary(prefs, args.samples, resolution=args.resolution)]
        result, diagnostics = _verify_payload(results)
        code = 0 if result["passed"] else 1
        if args.format == "csv":
            rows = [
                [r.claim.value, r.theta, r.gamma, name, obs, tol, "true" if obs <= tol else "false"]
                for r in results
                for name, (obs, tol) in r.checks.items()
            ]
            header = ["claim", "theta", "gamma", "check", "observed", "tolerance", "ok"]
            return _emit_csv(header, rows), code
        return _emit_json("verify", params, result, diagnostics), code

    if args.command == "sweep":
        rows = sweep_theta(args.theta_min, args.theta_max, args.steps, args.gamma, args.resolution, args.tol)
        table = [[r.theta, r.a, r.b, r.q, r.jhat, r.welfare, r.regime] for r in rows]
        if args.format == "csv":
            return _emit_csv(SWEEP_HEADER, table), 0
        result = {"rows": [dict(zip(SWEEP_HEADER, [*map(num, t[:6]), t[6]])) for t in table]}
        return _emit_json("sweep", params, result, {"steps": len(rows)}), 0

    lo, hi = args.bracket
    theta_star = detect_threshold(args.gamma, (lo, hi), args.tol, args.resolution)
    if args.format == "csv":
        return _emit_csv(["gamma", "lo", "hi", "threshold"], [[args.gamma, lo, hi, theta_star]]), 0
    return _emit_json("threshold", params, {"threshold": num(theta_star)}, {"bracket": [lo, hi]}), 0


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = _run(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
