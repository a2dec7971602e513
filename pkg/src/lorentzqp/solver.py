"""End-to-end solve: dual maximization, KKT enumeration fallback, solution
selection, verification residuals, optional oracle comparison, and the sweep
table behind the CSV output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dual import (
    CERT_GLOBAL,
    CERT_HARD,
    CERT_KKT,
    DEFAULT_MAX_ITER,
    DEFAULT_SAMPLES,
    DEFAULT_TOL_KKT,
    DEFAULT_TOL_ROOT,
    CriticalPoint,
    _maximize_with_notes,
    enumerate_kkt,
)
from .linalg import DEFAULT_TOL_EIG, factorize, min_eigenvalue
from .model import ProblemInstance, shifted_hessian
from .verify import (
    KKTResiduals,
    OracleResult,
    brute_force_min,
    default_oracle_radius,
    kkt_check,
)

__all__ = [
    "SolveReport",
    "Tolerances",
    "solve_problem",
    "sweep_table",
    "EXIT_CERTIFIED",
    "EXIT_UNCERTIFIED",
    "EXIT_HARD_CASE",
    "EXIT_NO_SOLUTION",
    "EXIT_BAD_INPUT",
    "EXIT_DIMENSION_MISMATCH",
]

EXIT_CERTIFIED = 0
EXIT_UNCERTIFIED = 2
EXIT_HARD_CASE = 3
EXIT_NO_SOLUTION = 4
EXIT_BAD_INPUT = 64
EXIT_DIMENSION_MISMATCH = 65

DEFAULT_TOL_GAP = 1e-8


@dataclass(frozen=True)
class Tolerances:
    tol_kkt: float = DEFAULT_TOL_KKT
    tol_eig: float = DEFAULT_TOL_EIG
    tol_root: float = DEFAULT_TOL_ROOT
    tol_gap: float = DEFAULT_TOL_GAP
    max_iter: int = DEFAULT_MAX_ITER
    samples_per_interval: int = DEFAULT_SAMPLES


@dataclass(frozen=True)
class SolveReport:
    """Self-contained solve outcome; serializable and re-verifiable."""

    problem: ProblemInstance
    solution: CriticalPoint | None
    critical_points: list[CriticalPoint]
    residuals: KKTResiduals | None
    oracle: OracleResult | None
    warnings: list[str]
    tolerances: Tolerances = field(default_factory=Tolerances)

    @property
    def exit_code(self) -> int:
        """Semantic exit code, a function of the certificate field only."""
        if self.solution is None:
            return EXIT_NO_SOLUTION
        return {
            CERT_GLOBAL: EXIT_CERTIFIED,
            CERT_KKT: EXIT_UNCERTIFIED,
            CERT_HARD: EXIT_HARD_CASE,
        }[self.solution.certificate]


def solve_problem(
    p: ProblemInstance,
    tol: Tolerances = Tolerances(),
    oracle: bool = False,
    oracle_radius: float | None = None,
    oracle_resolution: int = 128,
) -> SolveReport:
    """Solve the cone-constrained quadratic and assemble the report.

    The dual is maximized over its positive-definite window first; when that
    yields no certified point, all dual KKT points are enumerated and the
    best cone-feasible one (lowest objective, then lowest multiplier) is
    selected without a certificate.  Points recovered on the negative nappe
    are kept in the report but never selected.
    """
    warnings: list[str] = []
    best, notes = _maximize_with_notes(
        p, tol.tol_kkt, tol.tol_root, tol.tol_eig, tol.max_iter
    )
    warnings.extend(notes)

    if best is not None and best.certified:
        solution = best
        points = [best]
    else:
        points = enumerate_kkt(
            p, tol.tol_kkt, tol.samples_per_interval,
            tol.tol_root, tol.tol_eig, tol.max_iter,
        )
        if best is not None and best.certificate == CERT_HARD:
            # The limit value at the singular boundary weakly dominates every
            # cone-feasible KKT point, so the hard-case point is the answer.
            solution = best
            points = sorted(points + [best], key=lambda cp: cp.sigma)
        else:
            if best is not None and all(
                abs(cp.sigma - best.sigma) > 1e-9 * (1.0 + best.sigma) for cp in points
            ):
                points = sorted(points + [best], key=lambda cp: cp.sigma)
            feasible = [cp for cp in points if cp.nappe_ok]
            solution = min(feasible, key=lambda cp: (cp.primal_value, cp.sigma), default=None)

    if any(not cp.nappe_ok for cp in points):
        rejected = ", ".join(f"{cp.sigma:.6g}" for cp in points if not cp.nappe_ok)
        warnings.append(
            f"negative-nappe rejection: critical point(s) at sigma={rejected} recover "
            "x with x[0] < 0 and are excluded from solution selection"
        )
    if solution is None:
        warnings.append("no cone-feasible KKT point found; dual approach is inconclusive here")
    elif solution.certificate == CERT_KKT:
        warnings.append("certificate unavailable: G(sigma) not positive definite")

    residuals = None
    if solution is not None:
        residuals = kkt_check(p, solution.x, solution.sigma)

    oracle_result = None
    if oracle:
        certified = solution if (solution is not None and solution.certified) else None
        radius = oracle_radius if oracle_radius is not None else default_oracle_radius(p, certified)
        oracle_result = brute_force_min(p, radius, oracle_resolution)
        if oracle_result.unbounded_direction is not None:
            warnings.append(
                "oracle found a feasible direction of negative curvature; the objective "
                "is unbounded below on the cone"
            )
        if solution is not None:
            margin = 1e-6 * (1.0 + abs(solution.primal_value))
            if oracle_result.best_value < solution.primal_value - margin:
                warnings.append(
                    f"oracle found a better feasible point (value {oracle_result.best_value!r} "
                    f"vs solution {solution.primal_value!r})"
                )

    return SolveReport(
        problem=p,
        solution=solution,
        critical_points=points,
        residuals=residuals,
        oracle=oracle_result,
        warnings=warnings,
        tolerances=tol,
    )


def sweep_table(
    p: ProblemInstance,
    sigma_min: float,
    sigma_max: float,
    steps: int,
    tol_eig: float = DEFAULT_TOL_EIG,
) -> list[tuple[float, float | None, float | None, float, bool]]:
    """Rows (sigma, dual_value, dual_derivative, min_eigenvalue, is_pd).

    Value fields are None exactly where the shifted Hessian is singular under
    the scale-free tolerance; those rows serialize as empty CSV cells.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    rows = []
    for sigma in np.linspace(sigma_min, sigma_max, steps):
        sigma = float(sigma)
        G = shifted_hessian(p, sigma)
        f = factorize(G, tol_eig)
        lam = min_eigenvalue(G)
        if f.singular:
            rows.append((sigma, None, None, lam, False))
            continue
        x = np.linalg.solve(G, p.c)
        dv = -0.5 * float(p.c @ x)
        dd = 0.5 * (float(x[1:] @ x[1:]) - float(x[0]) ** 2)
        if not (math.isfinite(dv) and math.isfinite(dd)):
            rows.append((sigma, None, None, lam, False))
            continue
        rows.append((sigma, dv, dd, lam, bool(lam > 0.0)))
    return rows
