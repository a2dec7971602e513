"""Command-line surface.

Subcommands: solve, enumerate, sweep, check, oracle, gen.  Exit codes are
semantic: 0 certified global minimum, 2 KKT point(s) without certificate,
3 hard case solved without certificate, 4 no KKT point found, 64 malformed
input, 65 dimension mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dual import dual_value, enumerate_kkt
from .model import primal_objective
from .fileio import (
    GEN_KINDS,
    ProblemFormatError,
    as_dense,
    dumps_json,
    gen_instance,
    load_problem,
    point_to_jsonable,
    problem_to_jsonable,
    report_to_jsonable,
    sweep_csv,
    write_text_atomic,
)
from .linalg import SingularMatrixError
from .solver import (
    EXIT_BAD_INPUT,
    EXIT_DIMENSION_MISMATCH,
    Tolerances,
    solve_problem,
    sweep_table,
)
from .verify import brute_force_min, default_oracle_radius, kkt_check


def _add_tolerance_flags(sp):
    sp.add_argument("--tol-kkt", type=float, default=1e-8,
                    help="KKT residual tolerance (default 1e-8)")
    sp.add_argument("--tol-eig", type=float, default=1e-10,
                    help="scale-free singularity band for inertia (default 1e-10)")
    sp.add_argument("--tol-root", type=float, default=1e-10,
                    help="bisection width tolerance on sigma (default 1e-10)")
    sp.add_argument("--max-iter", type=int, default=200,
                    help="bisection iteration cap (default 200)")
    sp.add_argument("--samples", type=int, default=64,
                    help="derivative samples per pole interval (default 64)")


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        write_text_atomic(output, text)


def _load(path):
    try:
        return load_problem(path)
    except FileNotFoundError:
        print(f"error: cannot read problem file: {path}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)
    except ProblemFormatError as exc:
        print(f"error: invalid problem file {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _tolerances(args) -> Tolerances:
    return Tolerances(
        tol_kkt=args.tol_kkt, tol_eig=args.tol_eig, tol_root=args.tol_root,
        max_iter=args.max_iter, samples_per_interval=args.samples,
    )


def cmd_solve(args) -> int:
    p = as_dense(_load(args.problem))
    report = solve_problem(
        p, _tolerances(args), oracle=args.oracle,
        oracle_radius=args.oracle_radius, oracle_resolution=args.oracle_resolution,
    )
    _emit(dumps_json(report_to_jsonable(report, __version__)) + "\n", args.output)
    return report.exit_code


def cmd_enumerate(args) -> int:
    p = as_dense(_load(args.problem))
    points = enumerate_kkt(
        p, args.tol_kkt, args.samples, args.tol_root, args.tol_eig, args.max_iter
    )
    out = {
        "tool": {"name": "lorentzqp", "version": __version__},
        "problem": problem_to_jsonable(p),
        "critical_points": [point_to_jsonable(cp) for cp in points],
    }
    _emit(dumps_json(out) + "\n", args.output)
    return 0


def cmd_sweep(args) -> int:
    p = as_dense(_load(args.problem))
    if args.steps < 2:
        print("error: --steps must be at least 2", file=sys.stderr)
        return EXIT_BAD_INPUT
    rows = sweep_table(p, args.sigma_min, args.sigma_max, args.steps, args.tol_eig)
    _emit(sweep_csv(rows), args.output)
    return 0


def cmd_check(args) -> int:
    p = as_dense(_load(args.problem))
    try:
        with open(args.report, "r", encoding="utf-8") as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read report file {args.report}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT

    solution = report.get("solution")
    if solution is None:
        print("check: report carries no solution; nothing to verify")
        return 0
    try:
        x = np.asarray(solution["x"], dtype=float)
        sigma = float(solution["sigma"])
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed solution block: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if x.shape != (p.n,):
        print(
            f"error: dimension mismatch: problem has n={p.n}, report solution has "
            f"{x.shape[0]} components", file=sys.stderr,
        )
        return EXIT_DIMENSION_MISMATCH

    tols = report.get("tolerances", {})
    tol_kkt = float(tols.get("tol_kkt", 1e-8))
    tol_gap = float(tols.get("tol_gap", 1e-8))

    res = kkt_check(p, x, sigma)
    try:
        dv = dual_value(p, sigma)
        gap = abs(dv - primal_objective(p, x))
        gap_ok = gap <= tol_gap * (1.0 + abs(dv))
    except SingularMatrixError:
        gap, gap_ok = float("inf"), False

    checks = [
        ("stationarity", res.stationarity, tol_kkt),
        ("primal_feasibility", res.primal_feasibility, tol_kkt),
        ("nappe_violation", res.nappe_violation, tol_kkt),
        ("dual_feasibility", res.dual_feasibility, tol_kkt),
        ("complementarity", res.complementarity, tol_kkt),
    ]
    ok = gap_ok
    for label, value, tol in checks:
        passed = value <= tol
        ok = ok and passed
        print(f"check: {label} = {value:.3e} ({'ok' if passed else 'FAIL'}, tol {tol:.1e})")
    print(f"check: duality_gap = {gap:.3e} ({'ok' if gap_ok else 'FAIL'}, tol {tol_gap:.1e})")
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    p = as_dense(_load(args.problem))
    radius = args.radius if args.radius is not None else default_oracle_radius(p, None)
    try:
        result = brute_force_min(p, radius, args.resolution)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    out = {
        "tool": {"name": "lorentzqp", "version": __version__},
        "problem": problem_to_jsonable(p),
        "radius": radius,
        "oracle": {
            "best_x": result.best_x,
            "best_value": result.best_value,
            "grid_resolution": result.grid_resolution,
            "refined": result.refined,
            "unbounded_direction": result.unbounded_direction,
        },
    }
    _emit(dumps_json(out) + "\n", args.output)
    return 0


def cmd_gen(args) -> int:
    try:
        instance = gen_instance(args.kind, args.n, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    _emit(dumps_json(problem_to_jsonable(instance)) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorentzqp",
        description="Globally minimize (possibly nonconvex) quadratics over the "
                    "Lorentz cone via the one-dimensional concave dual.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve a problem file and write a report")
    sp.add_argument("problem")
    sp.add_argument("-o", "--output", help="report path (stdout if omitted)")
    sp.add_argument("--oracle", action="store_true",
                    help="also run the brute-force oracle and compare")
    sp.add_argument("--oracle-radius", type=float, default=None)
    sp.add_argument("--oracle-resolution", type=int, default=128)
    _add_tolerance_flags(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("enumerate", help="report every dual KKT point")
    sp.add_argument("problem")
    sp.add_argument("-o", "--output")
    _add_tolerance_flags(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("sweep", help="CSV of the dual curve over a sigma range")
    sp.add_argument("problem")
    sp.add_argument("--sigma-min", type=float, default=0.0)
    sp.add_argument("--sigma-max", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--tol-eig", type=float, default=1e-10)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("check", help="re-verify a report against its problem")
    sp.add_argument("problem")
    sp.add_argument("report")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("oracle", help="brute-force grid search over the cone")
    sp.add_argument("problem")
    sp.add_argument("--radius", type=float, default=None,
                    help="slice radius (default: deterministic fallback 10)")
    sp.add_argument("--resolution", type=int, default=128)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("gen", help="generate a seeded problem file")
    sp.add_argument("kind", choices=GEN_KINDS)
    sp.add_argument("n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0


if __name__ == "__main__":
    sys.exit(main())
