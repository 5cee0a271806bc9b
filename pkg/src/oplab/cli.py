"""``oplab`` command line: analyze, norm, verify, fuzz.

Exit codes: 0 success, 1 a check or fuzz comparison failed, 2 a theorem
cross-check failed (implementation bug), 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import AnalysisReport, analyze
from .errors import OplabError, TheoremViolation, ValidationError
from .grid import (
    GridFunction,
    affine_rn_derivative,
    sobolev_norm,
    verify_boundedness,
    verify_chain_rule,
    verify_kernel_derivative_vanishing,
    weak_derivative,
)
from .measure import pushforward
from .orlicz import DEFAULT_TOL, Power, luxemburg_norm
from .oracle import fuzz
from .scenario import SCHEMA, Scenario, ScenarioError, load, rational_str

EXIT_OK, EXIT_FAIL, EXIT_THEOREM, EXIT_INPUT = 0, 1, 2, 3

CHAIN_RULE_ORDER = 1.9
EXACT_FLOOR = 1e-10
VANISHING_TOL = 1e-14


def fmt12(x: float) -> str:
    """Fixed-point with 12 significant digits: 3 -> '3.00000000000'."""
    if x == 0:
        return "0." + "0" * 11
    if not math.isfinite(x):
        return str(x)
    decimals = max(11 - math.floor(math.log10(abs(x))), 0)
    return f"{x:.{decimals}f}"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit_json(payload: dict, target: str | None) -> None:
    if target is None:
        return
    text = _dump(payload)
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def analysis_to_dict(report: AnalysisReport, scenario: Scenario) -> dict:
    space, T = scenario.carrier, scenario.transformation
    ids = lambda s: [space.atoms[i] for i in sorted(s)]  # noqa: E731
    out = {
        "schema": SCHEMA,
        "command": "analyze",
        "scenario": scenario.name,
        "atoms": list(space.atoms),
        "weights": [rational_str(w) for w in space.weights],
        "mapping": [space.atoms[j] for j in T.mapping],
        "nonsingular": report.nonsingular,
        "singular_witness": None,
        "kernel": None,
        "injective": report.injective,
        "essentially_surjective": report.essentially_surjective,
        "measure_preserving": report.measure_preserving,
        "expansive": report.expansive,
        "ascent": None,
    }
    if not report.nonsingular:
        x, a = report.singular_witness
        out["singular_witness"] = {"atom": space.atoms[x], "image": space.atoms[a]}
        return out
    kd = report.kernel
    out["kernel"] = {
        "omega0": ids(kd.omega0),
        "kernel_dimension": kd.kernel_dimension,
        "is_zero_operator": kd.is_zero_operator,
        "rn_derivative": [rational_str(v) for v in kd.density.values],
        "pushforward": [rational_str(v) for v in pushforward(T, space, 1).weights],
    }
    asc = report.ascent
    out["ascent"] = {
        "ascent": asc.ascent,
        "stabilized_zero_set": None if asc.stabilized_zero_set is None else ids(asc.stabilized_zero_set),
        "certificate": [ids(z) for z in asc.certificate],
    }
    return out


def _render_analysis(d: dict) -> str:
    lines = [f"scenario: {d['scenario']}", f"atoms: {d['atoms']}", f"weights: {d['weights']}", f"T: {d['mapping']}"]
    if not d["nonsingular"]:
        w = d["singular_witness"]
        lines.append(f"nonsingular: no (atom {w['atom']!r} has positive mass, its image {w['image']!r} is null)")
        return "\n".join(lines) + "\n"
    k, a = d["kernel"], d["ascent"]
    lines += [
        "nonsingular: yes",
        f"density f_T: {k['rn_derivative']}",
        f"Omega_0 (zero set of f_T): {k['omega0']}",
        f"kernel dimension: {k['kernel_dimension']}",
        f"injective: {d['injective']}",
        f"essentially surjective: {d['essentially_surjective']}",
        f"measure preserving: {d['measure_preserving']}",
        f"expansive: {d['expansive']}",
        f"ascent: {a['ascent'] if a['ascent'] is not None else 'not settled within --max-k'}",
        "zero-set chain: " + " ".join(str(z) for z in a["certificate"]),
    ]
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    scenario = load(args.file)
    if not scenario.is_atomic or scenario.transformation is None:
        raise ScenarioError("carrier", "analyze needs an atomic carrier and an atomic transformation")
    report = analyze(scenario.transformation, scenario.carrier, args.max_k)
    payload = analysis_to_dict(report, scenario)
    if args.json != "-":
        sys.stdout.write(_render_analysis(payload))
    _emit_json(payload, args.json)
    return EXIT_OK


def cmd_norm(args) -> int:
    scenario = load(args.file)
    phi = scenario.orlicz
    if phi is None:
        raise ScenarioError("orlicz", "norm needs an orlicz field")
    f = scenario.function_values()
    payload = {"schema": SCHEMA, "command": "norm", "scenario": scenario.name, "phi": phi.label, "tol": args.tol}
    payload["luxemburg_norm"] = fmt12(luxemburg_norm(phi, f, scenario.carrier, args.tol))
    if not scenario.is_atomic:
        payload["derivative_norms"] = [
            fmt12(luxemburg_norm(phi, weak_derivative(f, i), scenario.carrier, args.tol))
            for i in range(scenario.carrier.n)
        ]
        payload["sobolev_norm"] = fmt12(sobolev_norm(phi, f, scenario.carrier, args.tol))
    if args.json != "-":
        lines = [f"phi: {phi.label}", f"tol: {args.tol:g}", f"luxemburg_norm: {payload['luxemburg_norm']}"]
        if "sobolev_norm" in payload:
            lines += [f"derivative_norm[{i}]: {v}" for i, v in enumerate(payload["derivative_norms"])]
            lines.append(f"sobolev_norm: {payload['sobolev_norm']}")
        sys.stdout.write("\n".join(lines) + "\n")
    _emit_json(payload, args.json)
    return EXIT_OK


def _order(coarse: float, fine: float) -> float | None:
    if coarse <= EXACT_FLOOR and fine <= EXACT_FLOOR:
        return None
    if fine == 0:
        return math.inf
    return math.log2(coarse / fine)


def verify_grid(scenario: Scenario, tol: float = DEFAULT_TOL) -> dict:
    """Chain-rule residuals at m and 2m, the boundedness inequality, and derivative vanishing on Omega_0."""
    domain, T = scenario.carrier, scenario.transformation
    phi = scenario.orlicz or Power(2)
    if scenario.function is not None and "table" in scenario.function:
        raise ScenarioError("function", "verify resamples on a refined grid and needs a builtin function")
    rows = []
    for d in (domain, domain.refined(2)):
        f = Scenario(scenario.name, d, T, phi, scenario.function).function_values()
        rows.append((d, f, verify_chain_rule(f, T, d)))
    r1, r2 = rows[0][2].max_abs_residual, rows[1][2].max_abs_residual
    order = _order(r1, r2)
    chain_ok = order is None or order >= CHAIN_RULE_ORDER
    f = rows[0][1]
    bound = verify_boundedness(phi, f, T, domain, tol)
    omega0 = affine_rn_derivative(T, domain).samples == 0
    masked = GridFunction(domain, np.where(omega0, f.samples, 0.0))
    vanish = verify_kernel_derivative_vanishing(masked, omega0, domain)
    vanish_ok = vanish.max_outside <= VANISHING_TOL
    return {
        "schema": SCHEMA,
        "command": "verify",
        "scenario": scenario.name,
        "phi": phi.label,
        "chain_rule": {
            "resolutions": [list(d.resolution) for d, _, _ in rows],
            "h": [rep.grid_h for _, _, rep in rows],
            "residuals": [rep.max_abs_residual for _, _, rep in rows],
            "order": order,
            "passed": chain_ok,
        },
        "boundedness": {
            "lhs": bound.lhs,
            "rhs": bound.rhs,
            "rn_sup": bound.rn_sup,
            "M": bound.M,
            "slack": bound.slack,
            "passed": bool(bound.holds),
        },
        "kernel_vanishing": {
            "omega0_cells": int(omega0.sum()),
            "max_outside": vanish.max_outside,
            "max_in_band": vanish.max_in_band,
            "band_width": vanish.boundary_band_width,
            "passed": vanish_ok,
        },
        "passed": bool(chain_ok and bound.holds and vanish_ok),
    }


def _render_verify(d: dict) -> str:
    c, b, v = d["chain_rule"], d["boundedness"], d["kernel_vanishing"]
    mark = lambda ok: "PASS" if ok else "FAIL"  # noqa: E731
    lines = [f"scenario: {d['scenario']}", f"phi: {d['phi']}", "chain rule residuals:", "  m         h             residual"]
    for res, h, r in zip(c["resolutions"], c["h"], c["residuals"]):
        lines.append(f"  {'x'.join(map(str, res)):<9} {h:<13.6g} {r:.6e}")
    order = "exact (at rounding level)" if c["order"] is None else f"{c['order']:.4f}"
    lines.append(f"  empirical order: {order}  [{mark(c['passed'])}]")
    lines.append(
        f"boundedness: lhs {b['lhs']:.12g} <= rhs {b['rhs']:.12g} (||f_T||_inf {b['rn_sup']:g}, M {b['M']:g}, slack {b['slack']:g})  [{mark(b['passed'])}]"
    )
    lines.append(
        f"kernel vanishing: {v['omega0_cells']} Omega_0 cells, max |D f| outside band {v['max_outside']:.3e}, in band {v['max_in_band']:.3e}  [{mark(v['passed'])}]"
    )
    lines.append(f"overall: {mark(d['passed'])}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    scenario = load(args.file)
    if scenario.is_atomic or scenario.transformation is None or scenario.function is None:
        raise ScenarioError("carrier", "verify needs a grid carrier, an affine transformation and a function")
    payload = verify_grid(scenario, args.tol)
    if args.json != "-":
        sys.stdout.write(_render_verify(payload))
    _emit_json(payload, args.json)
    return EXIT_OK if payload["passed"] else EXIT_FAIL


def cmd_fuzz(args) -> int:
    summary = fuzz(args.seed, args.instances, args.max_atoms, args.max_k)
    print(f"seed {args.seed}, max atoms {args.max_atoms}: {summary.line()}")
    if summary.counterexample is None:
        return EXIT_OK
    space, T, problems = summary.counterexample
    scenario = Scenario("fuzz-counterexample", space, T)
    for p in problems:
        print(f"  disagreement: {p}")
    Path(args.counterexample).write_text(scenario.dumps(), encoding="utf-8")
    print(f"counterexample written to {args.counterexample} (replay with: oplab analyze {args.counterexample})")
    sys.stdout.write(scenario.dumps())
    return EXIT_FAIL


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oplab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"oplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="kernel, injectivity and ascent of C_T on an atomic scenario")
    p.add_argument("file")
    p.add_argument("--json", metavar="PATH", help="also write the JSON report ('-' for stdout only)")
    p.add_argument("--max-k", type=_positive_int, default=None, help="cap on the ascent search")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("norm", help="Luxemburg (and grid Sobolev) norm of the scenario function")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("verify", help="chain rule, boundedness and kernel-vanishing checks on a grid scenario")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_verify)

    default_seed = int(os.environ.get("OPLAB_SEED", "42"))
    p = sub.add_parser("fuzz", help="compare theorem procedures with brute-force oracles on random instances")
    p.add_argument("--seed", type=int, default=default_seed, help="default: $OPLAB_SEED or 42")
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--max-atoms", type=_positive_int, default=10)
    p.add_argument("--max-k", type=_positive_int, default=None)
    p.add_argument("--counterexample", default="oplab-counterexample.json", metavar="PATH")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TheoremViolation as exc:
        print(f"oplab: theorem cross-check failed: {exc}", file=sys.stderr)
        return EXIT_THEOREM
    except (ValidationError, OplabError) as exc:
        print(f"oplab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
