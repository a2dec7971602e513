"""Independent verification: KKT residuals, duality gaps, and a brute-force
grid oracle that settles optimality claims empirically at desk scale.

The KKT residuals follow the multiplier system of the quadratic cone
reformulation: stationarity G(sigma)x = c, relaxed primal feasibility
cone_quadratic(x) <= 0, dual feasibility sigma >= 0, and complementarity
sigma * cone_quadratic(x) = 0.  The relaxed system also accepts the mirror
nappe x[0] <= -||x[1:]||, so the cone-membership defect max(-x[0], 0) is
carried separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import CriticalPoint, dual_value
from .model import ProblemInstance, cone_quadratic, primal_objective, shifted_hessian

__all__ = [
    "KKTResiduals",
    "OracleResult",
    "kkt_check",
    "duality_gap",
    "projection_lorentz",
    "brute_force_min",
    "default_oracle_radius",
]

POLISH_STEPS = 500
POLISH_STOP = 1e-12
CURVATURE_CUTOFF = -1e-10


@dataclass(frozen=True)
class KKTResiduals:
    """Residuals of the multiplier system for a (x, sigma) pair.

    ``max_residual`` covers the four relaxed conditions; ``nappe_violation``
    is the separate cone-membership defect (zero on the true cone).
    """

    stationarity: float
    primal_feasibility: float
    nappe_violation: float
    dual_feasibility: float
    complementarity: float

    @property
    def max_residual(self) -> float:
        return max(self.stationarity, self.primal_feasibility,
                   self.dual_feasibility, self.complementarity)

    def is_kkt(self, tol: float) -> bool:
        return self.max_residual <= tol

    def on_cone(self, tol: float) -> bool:
        return self.max_residual <= tol and self.nappe_violation <= tol


def kkt_check(p: ProblemInstance, x, sigma: float, tol: float = 1e-8) -> KKTResiduals:
    """Compute all residuals for (x, sigma).  ``tol`` is only a convenience
    default for the is_kkt/on_cone queries; residuals are exact."""
    del tol
    x = np.asarray(x, dtype=float)
    lam = cone_quadratic(x)
    return KKTResiduals(
        stationarity=float(np.max(np.abs(shifted_hessian(p, sigma) @ x - p.c))),
        primal_feasibility=max(lam, 0.0),
        nappe_violation=max(-float(x[0]), 0.0),
        dual_feasibility=max(-sigma, 0.0),
        complementarity=abs(sigma * lam),
    )


def duality_gap(p: ProblemInstance, x, sigma: float) -> float:
    """|primal objective at x - dual value at sigma| (singular shifts raise)."""
    return abs(primal_objective(p, x) - dual_value(p, sigma))


# ---------------------------------------------------------------------------
# projection and the grid oracle


def projection_lorentz(x) -> np.ndarray:
    """Euclidean projection onto the closed Lorentz cone (closed form)."""
    x = np.asarray(x, dtype=float)
    x1 = float(x[0])
    tail = float(np.linalg.norm(x[1:]))
    if tail <= x1:
        return x.copy()
    if x1 <= -tail:
        return np.zeros_like(x)
    alpha = 0.5 * (x1 + tail)
    out = np.empty_like(x)
    out[0] = alpha
    out[1:] = (alpha / tail) * x[1:]
    return out


def _project_rows(X: np.ndarray) -> np.ndarray:
    """Row-wise cone projection, vectorized."""
    x1 = X[:, 0]
    tail = np.linalg.norm(X[:, 1:], axis=1)
    inside = tail <= x1
    polar = x1 <= -tail
    out = X.copy()
    mid = ~inside & ~polar
    alpha = 0.5 * (x1[mid] + tail[mid])
    out[mid, 0] = alpha
    out[mid, 1:] = X[mid, 1:] * (alpha / tail[mid])[:, None]
    out[polar] = 0.0
    return out


def _slice_grid(n: int, radius: float, resolution: int) -> np.ndarray:
    """Deterministic grid over {0 <= x1 <= radius, ||x[1:]|| <= x1}.

    x1 runs at full resolution; the tail ball is sampled radially/angularly
    at documented coarser factors so the point count stays at desk scale.
    """
    x1s = np.linspace(0.0, radius, resolution)
    if n == 2:
        t = np.linspace(-1.0, 1.0, resolution)
        X1, T = np.meshgrid(x1s, t, indexing="ij")
        pts = np.stack([X1.ravel(), (X1 * T).ravel()], axis=1)
        return pts
    rad = np.linspace(0.0, 1.0, max(4, resolution // 16) + 1)
    if n == 3:
        theta = np.linspace(0.0, 2.0 * np.pi, max(16, resolution // 4), endpoint=False)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    elif n == 4:
        m = max(8, resolution // 16)
        theta = np.linspace(0.0, np.pi, m)
        phi = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
        TH, PH = np.meshgrid(theta, phi, indexing="ij")
        dirs = np.stack(
            [np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)], axis=2
        ).reshape(-1, 3)
    else:
        raise ValueError("exhaustive oracle grid supports n <= 4 only")
    tails = rad[:, None, None] * dirs[None, :, :]          # (nr, nd, n-1)
    tails = tails.reshape(-1, n - 1)
    pts = np.empty((x1s.size * tails.shape[0], n))
    X1 = np.repeat(x1s, tails.shape[0])
    pts[:, 0] = X1
    pts[:, 1:] = X1[:, None] * np.tile(tails, (x1s.size, 1))
    return pts


def _direction_samples(n: int, resolution: int) -> np.ndarray:
    """Unit feasible directions: the axis plus rings out to the boundary."""
    fracs = np.linspace(0.0, 1.0, 5)                        # axis .. 45 degrees
    if n == 2:
        udirs = np.array([[-1.0], [1.0]])
    elif n == 3:
        theta = np.linspace(0.0, 2.0 * np.pi, max(16, resolution // 4), endpoint=False)
        udirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    else:
        m = max(8, resolution // 16)
        theta = np.linspace(0.0, np.pi, m)
        phi = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
        TH, PH = np.meshgrid(theta, phi, indexing="ij")
        udirs = np.stack(
            [np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)], axis=2
        ).reshape(-1, n - 1)
    out = [np.concatenate(([1.0], np.zeros(n - 1)))]
    for f in fracs[1:]:
        ang = f * np.pi / 4.0
        for u in udirs:
            d = np.concatenate(([np.cos(ang)], np.sin(ang) * u))
            out.append(d / np.linalg.norm(d))
    return np.asarray(out)


@dataclass(frozen=True)
class OracleResult:
    """Best feasible point found by the deterministic grid + polish oracle."""

    best_x: np.ndarray
    best_value: float
    grid_resolution: int
    refined: bool
    unbounded_direction: np.ndarray | None


def brute_force_min(p: ProblemInstance, radius: float, resolution: int = 128) -> OracleResult:
    """Grid the cone slice, polish every point by projected gradient descent,
    and scan feasible directions for negative curvature.

    Deterministic and bit-reproducible: fixed grid, fixed step
    1/(||Q||_inf + 1), at most POLISH_STEPS iterations with a global
    displacement stop, value ties broken lexicographically by coordinates.
    Polish iterates are rescaled into a large ball so unbounded instances
    stay finite; escape shows up as a very negative best value alongside the
    reported unbounded direction.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    X = _slice_grid(p.n, radius, resolution)
    step = 1.0 / (float(np.abs(p.Q).sum(axis=1).max()) + 1.0)
    cap = 1e6 * (1.0 + radius)
    for _ in range(POLISH_STEPS):
        Xn = _project_rows(X - step * (X @ p.Q - p.c))
        big = np.abs(Xn).max(axis=1) > cap
        if np.any(big):
            Xn[big] *= (cap / np.abs(Xn[big]).max(axis=1))[:, None]
        disp = float(np.max(np.abs(Xn - X)))
        X = Xn
        if disp < POLISH_STOP:
            break

    vals = 0.5 * np.einsum("ij,ij->i", X @ p.Q, X) - X @ p.c
    order = np.lexsort(tuple(X[:, k] for k in range(p.n - 1, -1, -1)) + (vals,))
    best = order[0]

    dirs = _direction_samples(p.n, resolution)
    curv = np.einsum("ij,ij->i", dirs @ p.Q, dirs)
    k = int(np.argmin(curv))
    unbounded = dirs[k] if curv[k] < CURVATURE_CUTOFF else None

    return OracleResult(
        best_x=X[best].copy(),
        best_value=float(vals[best]),
        grid_resolution=resolution,
        refined=True,
        unbounded_direction=unbounded,
    )


def default_oracle_radius(p: ProblemInstance, certified: CriticalPoint | None) -> float:
    """Crude deterministic bound on the minimizer norm.

    With a certificate the curvature of the shifted Hessian at the certified
    multiplier bounds the solution; otherwise fall back to a fixed 10.
    """
    if certified is None:
        return 10.0
    lam = float(np.linalg.eigvalsh(shifted_hessian(p, certified.sigma))[0])
    return 4.0 * (1.0 + float(np.linalg.norm(p.c)) / max(1e-6, abs(lam)))
