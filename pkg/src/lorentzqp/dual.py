"""One-dimensional dual of the cone-constrained quadratic.

The dual function ``d(sigma) = -0.5 * c' G(sigma)^{-1} c`` with
``G(sigma) = Q + sigma*diag(-1,1,...,1)`` is concave wherever G is positive
definite, and its derivative at sigma equals ``cone_quadratic(x(sigma))``
for the recovered point ``x(sigma) = G(sigma)^{-1} c``.  Interior roots of
the derivative are dual KKT points; they map one-to-one onto stationary
points of the primal with ``primal value == dual value``.

This module locates the positive-definite window of G, maximizes the dual
there (including the singular-boundary hard case), and enumerates *all*
dual KKT points over the nonsingular range by per-pole-interval sampling
and safeguarded bisection/Newton root finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL_EIG,
    Factorization,
    SingularMatrixError,
    factorize,
    min_eigenvalue,
    pencil_singular_sigmas,
    solve_linear,
)
from .model import (
    ProblemInstance,
    cone_quadratic,
    lorentz_signs,
    primal_objective,
    shifted_hessian,
)

__all__ = [
    "CERT_GLOBAL",
    "CERT_KKT",
    "CERT_HARD",
    "DualInterval",
    "CriticalPoint",
    "HardCaseError",
    "dual_value",
    "dual_derivative",
    "pd_interval",
    "maximize_dual",
    "enumerate_kkt",
    "recover_primal",
    "hard_case_solve",
]

CERT_GLOBAL = "global_min_certified"
CERT_KKT = "kkt_no_certificate"
CERT_HARD = "boundary_hard_case"

DEFAULT_TOL_ROOT = 1e-10
DEFAULT_TOL_KKT = 1e-8
DEFAULT_MAX_ITER = 200
DEFAULT_SAMPLES = 64

# Intervals are shrunk by this relative margin at singular endpoints before
# sampling, to stay clear of catastrophic cancellation at the poles.
POLE_MARGIN = 1e-9
# Tolerance for the nappe test x[0] >= -tol (scale-free).
NAPPE_TOL = 1e-8


class HardCaseError(RuntimeError):
    """The dual supremum is not attained at the singular boundary."""


@dataclass(frozen=True)
class DualInterval:
    """Maximal sub-interval of [0, inf) with G(sigma) in a fixed regime."""

    lo: float
    hi: float
    kind: str  # "positive_definite" or "nonsingular_indefinite"
    lo_singular: bool
    hi_singular: bool


@dataclass(frozen=True)
class CriticalPoint:
    """A dual KKT candidate and its recovered primal point."""

    sigma: float
    x: np.ndarray
    dual_value: float
    primal_value: float
    inertia: tuple[int, int, int]
    certificate: str
    nappe_ok: bool

    @property
    def certified(self) -> bool:
        return self.certificate == CERT_GLOBAL


# ---------------------------------------------------------------------------
# dual function and derivative


def _factorized(p: ProblemInstance, sigma: float, tol_eig: float) -> Factorization:
    f = factorize(shifted_hessian(p, sigma), tol_eig)
    if f.singular:
        raise SingularMatrixError(
            f"G(sigma) is singular at sigma={sigma!r}", sigma=sigma
        )
    return f


def recover_primal(p: ProblemInstance, sigma: float, tol_eig: float = DEFAULT_TOL_EIG) -> np.ndarray:
    """Solve the stationarity system G(sigma) x = c."""
    return solve_linear(_factorized(p, sigma, tol_eig), p.c)


def dual_value(p: ProblemInstance, sigma: float, tol_eig: float = DEFAULT_TOL_EIG) -> float:
    """-0.5 * c' G(sigma)^{-1} c.  Raises SingularMatrixError at singular shifts."""
    x = recover_primal(p, sigma, tol_eig)
    return -0.5 * float(p.c @ x)


def dual_derivative(p: ProblemInstance, sigma: float, tol_eig: float = DEFAULT_TOL_EIG) -> float:
    """Derivative of the dual: cone_quadratic of the recovered point."""
    return cone_quadratic(recover_primal(p, sigma, tol_eig))


def _g_raw(p: ProblemInstance, sigma: float) -> float:
    """Derivative via a plain LU solve; caller keeps sigma off the poles."""
    x = np.linalg.solve(shifted_hessian(p, sigma), p.c)
    return cone_quadratic(x)


def _g_batch(p: ProblemInstance, sigmas: np.ndarray) -> np.ndarray:
    """Vectorized derivative samples; NaN where the solve fails."""
    m = sigmas.shape[0]
    n = p.n
    Gs = np.broadcast_to(p.Q, (m, n, n)).copy()
    d = np.arange(n)
    Gs[:, d, d] += sigmas[:, None] * lorentz_signs(n)
    rhs = np.broadcast_to(p.c, (m, n))[..., None]
    try:
        xs = np.linalg.solve(Gs, rhs)[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty(m)
        for i, s in enumerate(sigmas):
            try:
                out[i] = _g_raw(p, float(s))
            except np.linalg.LinAlgError:
                out[i] = np.nan
        return out
    return 0.5 * (np.sum(xs[:, 1:] ** 2, axis=1) - xs[:, 0] ** 2)


def _g_and_slope(p: ProblemInstance, sigma: float) -> tuple[float, float]:
    """Derivative and its own derivative: g' = -(Lx)' G^{-1} (Lx)."""
    G = shifted_hessian(p, sigma)
    x = np.linalg.solve(G, p.c)
    Lx = x * lorentz_signs(p.n)
    y = np.linalg.solve(G, Lx)
    return cone_quadratic(x), -float(Lx @ y)


# ---------------------------------------------------------------------------
# positive-definite window


def _merged_poles(p: ProblemInstance) -> list[float]:
    merged: list[float] = []
    for s in pencil_singular_sigmas(p):
        if merged and s - merged[-1] <= 1e-9 * (1.0 + s):
            continue
        merged.append(s)
    return merged


def _bisect_pd_edge(p: ProblemInstance, inside: float, outside: float, tol: float) -> float:
    """Boundary of {sigma : G(sigma) PD} between a PD point and a non-PD point."""
    max_steps = 200
    for _ in range(max_steps):
        if abs(outside - inside) <= tol * (1.0 + abs(inside)):
            break
        mid = 0.5 * (inside + outside)
        if min_eigenvalue(shifted_hessian(p, mid)) > 0.0:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def pd_interval(p: ProblemInstance, tol: float = DEFAULT_TOL_ROOT) -> DualInterval | None:
    """The unique maximal interval of sigma >= 0 where G(sigma) is PD.

    The PD set is the preimage of the (convex) PD cone under an affine map,
    hence a single interval bounded above by Q[0,0] (the (0,0) entry of G
    must stay positive).  Candidate windows are the cells between consecutive
    singular shifts; one interior PD sample identifies the window and both
    endpoints are then located by bisection on the minimum eigenvalue.
    """
    cap = float(p.Q[0, 0])
    if cap <= 0.0:
        return None
    all_poles = _merged_poles(p)
    poles = [s for s in all_poles if s < cap * (1.0 - 1e-12)]
    breaks = [0.0] + poles + [cap]

    if min_eigenvalue(p.Q) > 0.0:
        pd_at = 0.0
        cell = 0
    else:
        pd_at = None
        for i in range(len(breaks) - 1):
            a, b = breaks[i], breaks[i + 1]
            for frac in (0.5, 0.25, 0.75):
                s = a + frac * (b - a)
                if min_eigenvalue(shifted_hessian(p, s)) > 0.0:
                    pd_at, cell = s, i
                    break
            if pd_at is not None:
                break
        if pd_at is None:
            return None

    if pd_at == 0.0:
        lo = 0.0
        lo_singular = False
    else:
        lo = _bisect_pd_edge(p, pd_at, breaks[cell], tol)
        lo_singular = True
    hi = _bisect_pd_edge(p, pd_at, breaks[cell + 1], tol)
    # Snap to the eigenvalue-accurate pole when the bisection lands on one.
    for s in all_poles:
        if abs(hi - s) <= 10.0 * tol * (1.0 + s):
            hi = s
        if lo_singular and abs(lo - s) <= 10.0 * tol * (1.0 + s):
            lo = s
    return DualInterval(lo=lo, hi=hi, kind="positive_definite",
                        lo_singular=lo_singular, hi_singular=True)


# ---------------------------------------------------------------------------
# critical-point construction and root refinement


def build_critical_point(
    p: ProblemInstance,
    sigma: float,
    tol_eig: float = DEFAULT_TOL_EIG,
    certificate: str | None = None,
    x: np.ndarray | None = None,
) -> CriticalPoint:
    """Complete a dual candidate sigma into a classified CriticalPoint."""
    f = factorize(shifted_hessian(p, sigma), tol_eig)
    if x is None:
        x = solve_linear(f, p.c)
    nappe_ok = bool(x[0] >= -NAPPE_TOL * (1.0 + float(np.max(np.abs(x)))))
    if certificate is None:
        certificate = CERT_GLOBAL if (f.positive_definite and nappe_ok) else CERT_KKT
    return CriticalPoint(
        sigma=float(sigma),
        x=np.asarray(x, dtype=float),
        dual_value=-0.5 * float(p.c @ x),
        primal_value=primal_objective(p, x),
        inertia=f.inertia,
        certificate=certificate,
        nappe_ok=nappe_ok,
    )


def _refine_root(
    p: ProblemInstance,
    a: float,
    b: float,
    ga: float,
    gb: float,
    tol_root: float,
    max_iter: int,
) -> tuple[float, float]:
    """Bracketed bisection followed by Newton polish on the dual derivative."""
    for _ in range(max_iter):
        if b - a <= tol_root * (1.0 + 0.5 * abs(a + b)):
            break
        mid = 0.5 * (a + b)
        gm = _g_raw(p, mid)
        if gm == 0.0:
            a = b = mid
            ga = gb = gm
            break
        if (gm > 0.0) == (ga > 0.0):
            a, ga = mid, gm
        else:
            b, gb = mid, gm
    sigma = 0.5 * (a + b)
    best_s, best_g = sigma, _g_raw(p, sigma)
    s = sigma
    for _ in range(30):
        g, gp = _g_and_slope(p, s)
        if abs(g) < abs(best_g):
            best_s, best_g = s, g
        if g == 0.0 or gp == 0.0 or not math.isfinite(gp):
            break
        step = g / gp
        s_new = s - step
        if not (a - (b - a) <= s_new <= b + (b - a)) or not math.isfinite(s_new):
            break
        if abs(step) <= 1e-17 * (1.0 + abs(s)):
            break
        s = s_new
    return best_s, best_g


# ---------------------------------------------------------------------------
# dual maximization over the PD window


def maximize_dual(
    p: ProblemInstance,
    tol: float = DEFAULT_TOL_KKT,
    tol_root: float = DEFAULT_TOL_ROOT,
    tol_eig: float = DEFAULT_TOL_EIG,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CriticalPoint | None:
    """Maximize the concave dual over its positive-definite window.

    Cases: the window may contain sigma=0 with nonincreasing dual
    (complementarity holds at 0), an interior derivative root, or a
    derivative that stays positive up to the singular upper boundary
    (hard case).  Windows that start above 0 with a nonpositive derivative
    carry no certified point and yield None.
    """
    point, _ = _maximize_with_notes(p, tol, tol_root, tol_eig, max_iter)
    return point


def _maximize_with_notes(
    p: ProblemInstance,
    tol: float = DEFAULT_TOL_KKT,
    tol_root: float = DEFAULT_TOL_ROOT,
    tol_eig: float = DEFAULT_TOL_EIG,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[CriticalPoint | None, list[str]]:
    notes: list[str] = []
    window = pd_interval(p, tol_root)
    if window is None:
        return None, ["no positive-definite dual window; certificate unavailable"]

    lo_eval = window.lo if not window.lo_singular else window.lo + POLE_MARGIN * (1.0 + abs(window.lo))
    hi_eval = window.hi - POLE_MARGIN * (1.0 + abs(window.hi))
    if lo_eval >= hi_eval:
        return None, ["positive-definite dual window is numerically degenerate"]

    g_lo = _g_raw(p, lo_eval)
    if not window.lo_singular and g_lo <= tol:
        point = build_critical_point(p, 0.0, tol_eig)
        if not point.nappe_ok:
            notes.append(
                "negative-nappe rejection: dual maximum at sigma=0 recovers a point "
                "with x[0] < 0"
            )
        return point, notes
    if g_lo <= 0.0:
        if abs(g_lo) <= tol:
            point = build_critical_point(p, lo_eval, tol_eig)
            return point, notes
        return None, [
            "dual is decreasing at the lower edge of the positive-definite window; "
            "no certified maximum inside it"
        ]

    g_hi = _g_raw(p, hi_eval)
    if g_hi > 0.0:
        # Supremum at the singular upper boundary: hard case.
        try:
            point = hard_case_solve(p, window.hi, tol=tol, tol_eig=tol_eig)
        except HardCaseError as exc:
            return None, [f"hard case without boundary solution: {exc}; no certificate, see oracle"]
        notes.append("dual supremum attained only at the singular boundary (hard case)")
        return point, notes

    sigma, g = _refine_root(p, lo_eval, hi_eval, g_lo, g_hi, tol_root, max_iter)
    if abs(g) > tol:
        return None, [
            f"dual derivative root did not refine below tolerance (|g|={abs(g):.3e})"
        ]
    point = build_critical_point(p, sigma, tol_eig)
    if not point.nappe_ok:
        notes.append(
            f"negative-nappe rejection: dual maximum at sigma={sigma:.12g} recovers a "
            "point with x[0] < 0; it solves only the two-nappe relaxation"
        )
        point = CriticalPoint(
            sigma=point.sigma, x=point.x, dual_value=point.dual_value,
            primal_value=point.primal_value, inertia=point.inertia,
            certificate=CERT_KKT, nappe_ok=False,
        )
    return point, notes


# ---------------------------------------------------------------------------
# full KKT enumeration over the nonsingular range


def enumerate_kkt(
    p: ProblemInstance,
    tol: float = DEFAULT_TOL_KKT,
    samples_per_interval: int = DEFAULT_SAMPLES,
    tol_root: float = DEFAULT_TOL_ROOT,
    tol_eig: float = DEFAULT_TOL_EIG,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[CriticalPoint]:
    """All dual KKT points over [0, sigma_max], classified by inertia.

    The range is partitioned at the singular shifts; each open cell is
    sampled (the derivative need not be monotone outside the PD window) and
    every sign change is refined to a root.  sigma = 0 is admitted whenever
    the derivative there is nonpositive, which makes complementarity hold
    identically.  sigma_max = largest pole + 10*(1 + largest pole) bounds the
    search; the derivative keeps a fixed sign beyond all poles once the
    recovered point decays, so the miss risk is confined to that tail.
    """
    if samples_per_interval < 8:
        raise ValueError("samples_per_interval must be at least 8")

    if float(np.max(np.abs(p.c))) == 0.0:
        # Degenerate dual: x(sigma) = 0 for every nonsingular shift.  Report
        # the single stationary point at the cone vertex.
        poles = _merged_poles(p)
        sigma0 = 0.0
        if any(abs(s) <= 1e-12 for s in poles):
            first = min((s for s in poles if s > 1e-12), default=1.0)
            sigma0 = 0.5 * first
        return [build_critical_point(p, sigma0, tol_eig, x=np.zeros(p.n))]

    poles = _merged_poles(p)
    top = poles[-1] if poles else 0.0
    sigma_max = top + 10.0 * (1.0 + top)
    zero_singular = bool(poles) and poles[0] <= 1e-12

    # Breakpoints tagged by whether they need a pole-exclusion margin.
    breaks: list[tuple[float, bool]] = [] if zero_singular else [(0.0, False)]
    breaks += [(s, True) for s in poles]
    breaks += [(sigma_max, False)]

    roots: list[tuple[float, float]] = []
    for (a, a_pole), (b, b_pole) in zip(breaks[:-1], breaks[1:]):
        sa = a + POLE_MARGIN * (1.0 + abs(a)) if a_pole else a
        sb = b - POLE_MARGIN * (1.0 + abs(b)) if b_pole else b
        if sa >= sb:
            continue
        grid = np.linspace(sa, sb, samples_per_interval)
        g = _g_batch(p, grid)
        # Exact zeros first; a run of zeros (a critical *family*, possible for
        # symmetric data) collapses to one representative.
        in_run = False
        for i in range(samples_per_interval):
            if not np.isnan(g[i]) and g[i] == 0.0:
                if not in_run:
                    roots.append((float(grid[i]), 0.0))
                in_run = True
            else:
                in_run = False
        for i in range(samples_per_interval - 1):
            gi, gj = g[i], g[i + 1]
            if np.isnan(gi) or np.isnan(gj) or gi == 0.0 or gj == 0.0:
                continue
            if gi * gj < 0.0:
                roots.append(
                    _refine_root(p, float(grid[i]), float(grid[i + 1]),
                                 float(gi), float(gj), tol_root, max_iter)
                )

    accepted: list[float] = []
    for sigma, g in sorted(roots):
        if sigma <= 0.0:
            continue
        if abs(g) > tol or sigma * abs(g) > tol:
            continue
        if accepted and sigma - accepted[-1] <= 1e-9 * (1.0 + sigma):
            continue
        accepted.append(sigma)

    points = [build_critical_point(p, s, tol_eig) for s in accepted]

    if not zero_singular:
        try:
            g0 = _g_raw(p, 0.0)
        except np.linalg.LinAlgError:
            g0 = np.inf
        if g0 <= tol:
            points.insert(0, build_critical_point(p, 0.0, tol_eig))

    points.sort(key=lambda cp: cp.sigma)
    return points


# ---------------------------------------------------------------------------
# singular boundary (hard case)


def hard_case_solve(
    p: ProblemInstance,
    sigma_sing: float,
    tol: float = DEFAULT_TOL_KKT,
    tol_eig: float = DEFAULT_TOL_EIG,
) -> CriticalPoint:
    """Boundary solution when the dual supremum sits at a singular shift.

    Requires c orthogonal (within tol*(1+||c||)) to the null space of
    G(sigma_sing); the pseudo-solution is then completed with a null-space
    step chosen so the result lies exactly on the cone boundary, mirroring
    the trust-region hard case.
    """
    G = shifted_hessian(p, sigma_sing)
    w, U = np.linalg.eigh(G)
    band = 1e-8 * max(1.0, float(np.abs(G).sum(axis=1).max()))
    null_mask = np.abs(w) <= band
    if not np.any(null_mask):
        raise HardCaseError(
            f"G(sigma) is not singular at sigma={sigma_sing!r} (no null space found)"
        )
    U0 = U[:, null_mask]
    U1 = U[:, ~null_mask]
    w1 = w[~null_mask]

    c_null = U0.T @ p.c
    if float(np.linalg.norm(c_null)) > tol * (1.0 + float(np.linalg.norm(p.c))):
        raise HardCaseError(
            "c has a component in the null space of G(sigma); the dual supremum "
            "is not attained"
        )
    x_p = U1 @ ((U1.T @ p.c) / w1)

    # Deterministic null direction: maximize the first component.
    first_row = U0[0, :]
    if float(np.linalg.norm(first_row)) > 1e-12:
        v = U0 @ (first_row / np.linalg.norm(first_row))
    else:
        v = U0[:, 0]

    # cone_quadratic(x_p + t v) is quadratic in t.
    signs = lorentz_signs(p.n)
    quad_a = float((v * signs) @ v)
    lin_b = float((v * signs) @ x_p)
    const = cone_quadratic(x_p)
    candidates: list[float] = []
    if abs(quad_a) <= 1e-14:
        if abs(lin_b) > 1e-14:
            candidates.append(-const / lin_b)
        elif abs(const) <= tol:
            candidates.append(0.0)
    else:
        disc = lin_b * lin_b - 2.0 * quad_a * const
        if disc >= 0.0:
            r = math.sqrt(disc)
            candidates.extend([(-lin_b - r) / quad_a, (-lin_b + r) / quad_a])

    scale = 1.0 + float(np.max(np.abs(x_p)))
    admissible = [
        t for t in candidates
        if math.isfinite(t) and (x_p[0] + t * v[0]) >= -NAPPE_TOL * scale
    ]
    if not admissible:
        raise HardCaseError(
            "no boundary point with x[0] >= 0 along the null direction; the dual "
            "supremum is not attained"
        )
    t = min(admissible, key=abs)
    x = x_p + t * v
    return build_critical_point(p, sigma_sing, tol_eig, certificate=CERT_HARD, x=x)
