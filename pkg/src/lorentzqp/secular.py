"""Closed-form diagonal specialization of the dual.

For Q = diag(q) the shifted Hessian is diagonal, the dual collapses to the
secular function ``-0.5 * sum(c_i^2 / (q_i + sigma*s_i))`` with signature
``s = (-1, 1, ..., 1)``, and every quantity of the dense path has a
componentwise formula.  This module keeps its arithmetic independent of the
dense linear-algebra route so the two can cross-check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dual import (
    CERT_GLOBAL,
    CERT_KKT,
    DEFAULT_MAX_ITER,
    DEFAULT_SAMPLES,
    DEFAULT_TOL_KKT,
    DEFAULT_TOL_ROOT,
    NAPPE_TOL,
    POLE_MARGIN,
    CriticalPoint,
)
from .linalg import DEFAULT_TOL_EIG
from .model import ProblemInstance

__all__ = [
    "DiagonalInstance",
    "SecularPoleError",
    "secular_value",
    "secular_derivative",
    "secular_enumerate",
]


class SecularPoleError(ZeroDivisionError):
    """A secular evaluation hit a pole of the diagonal dual."""

    def __init__(self, index: int, sigma: float):
        super().__init__(f"secular function pole hit at component {index}, sigma={sigma!r}")
        self.index = index
        self.sigma = sigma


@dataclass(frozen=True)
class DiagonalInstance:
    """Diagonal quadratic instance: Q = diag(q)."""

    q: np.ndarray
    c: np.ndarray
    name: str | None = None
    n: int = field(init=False)

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        c = np.array(self.c, dtype=float)
        if q.ndim != 1 or q.shape != c.shape:
            raise ValueError("q and c must be vectors of the same length")
        if q.shape[0] < 2:
            raise ValueError("dimension must be at least 2")
        q.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "n", q.shape[0])

    def to_dense(self) -> ProblemInstance:
        return ProblemInstance(Q=np.diag(self.q), c=self.c, name=self.name)


def _denominators(d: DiagonalInstance, sigma: float) -> np.ndarray:
    den = d.q + sigma
    den[0] = d.q[0] - sigma
    return den


def _check_poles(d: DiagonalInstance, sigma: float, den: np.ndarray):
    bad = np.abs(den) <= 1e-12 * (1.0 + np.abs(d.q) + abs(sigma))
    if np.any(bad):
        raise SecularPoleError(int(np.argmax(bad)), sigma)


def secular_value(d: DiagonalInstance, sigma: float) -> float:
    """-0.5 * [c1^2/(q1 - sigma) + sum_{i>=2} c_i^2/(q_i + sigma)]."""
    den = _denominators(d, sigma)
    _check_poles(d, sigma, den)
    return -0.5 * float(np.sum(d.c**2 / den))


def secular_derivative(d: DiagonalInstance, sigma: float) -> float:
    """0.5 * [sum_{i>=2} c_i^2/(q_i + sigma)^2 - c1^2/(q1 - sigma)^2]."""
    den = _denominators(d, sigma)
    _check_poles(d, sigma, den)
    terms = d.c**2 / den**2
    return 0.5 * (float(np.sum(terms[1:])) - float(terms[0]))


def _slope(d: DiagonalInstance, sigma: float) -> float:
    """Second derivative of the secular dual."""
    den = _denominators(d, sigma)
    return -float(np.sum(d.c**2 / den**3))


def _poles(d: DiagonalInstance) -> list[float]:
    """Nonnegative singular shifts of diag(q) + sigma*diag(-1,1,...,1), merged."""
    raw = np.concatenate(([d.q[0]], -d.q[1:]))
    scale = 1.0 + float(np.max(np.abs(d.q)))
    raw = raw[raw >= -1e-9 * scale]
    merged: list[float] = []
    for s in sorted(float(max(v, 0.0)) for v in raw):
        if merged and s - merged[-1] <= 1e-9 * (1.0 + s):
            continue
        merged.append(s)
    return merged


def _refine(d, a, b, ga, gb, tol_root, max_iter):
    for _ in range(max_iter):
        if b - a <= tol_root * (1.0 + 0.5 * abs(a + b)):
            break
        mid = 0.5 * (a + b)
        gm = secular_derivative(d, mid)
        if gm == 0.0:
            a = b = mid
            break
        if (gm > 0.0) == (ga > 0.0):
            a, ga = mid, gm
        else:
            b, gb = mid, gm
    sigma = 0.5 * (a + b)
    best_s, best_g = sigma, secular_derivative(d, sigma)
    s = sigma
    for _ in range(30):
        g = secular_derivative(d, s)
        gp = _slope(d, s)
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


def _point(d: DiagonalInstance, sigma: float, tol_eig: float) -> CriticalPoint:
    den = _denominators(d, sigma)
    x = d.c / den
    band = tol_eig * max(1.0, float(np.max(np.abs(den))))
    n_zero = int(np.sum(np.abs(den) <= band))
    n_pos = int(np.sum(den > band))
    inertia = (n_pos, n_zero, d.n - n_zero - n_pos)
    nappe_ok = bool(x[0] >= -NAPPE_TOL * (1.0 + float(np.max(np.abs(x)))))
    certificate = CERT_GLOBAL if (inertia == (d.n, 0, 0) and nappe_ok) else CERT_KKT
    dual = -0.5 * float(np.sum(d.c * x))
    primal = 0.5 * float(np.sum(d.q * x * x)) - float(np.sum(d.c * x))
    return CriticalPoint(
        sigma=float(sigma), x=x, dual_value=dual, primal_value=primal,
        inertia=inertia, certificate=certificate, nappe_ok=nappe_ok,
    )


def secular_enumerate(
    d: DiagonalInstance,
    tol: float = DEFAULT_TOL_KKT,
    samples_per_interval: int = DEFAULT_SAMPLES,
    tol_root: float = DEFAULT_TOL_ROOT,
    tol_eig: float = DEFAULT_TOL_EIG,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[CriticalPoint]:
    """All dual KKT points of the diagonal instance, by per-interval scan.

    Mirrors the dense enumeration contract (same partition, margins, sampling
    density, acceptance gates) while evaluating everything in closed form.
    The derivative is a difference of pole terms and may have up to two roots
    per interior interval, so each cell is scanned rather than assumed
    monotone.
    """
    if samples_per_interval < 8:
        raise ValueError("samples_per_interval must be at least 8")

    if float(np.max(np.abs(d.c))) == 0.0:
        poles = _poles(d)
        sigma0 = 0.0
        if any(abs(s) <= 1e-12 for s in poles):
            first = min((s for s in poles if s > 1e-12), default=1.0)
            sigma0 = 0.5 * first
        pt = _point(d, sigma0, tol_eig)
        return [pt]

    poles = _poles(d)
    top = poles[-1] if poles else 0.0
    sigma_max = top + 10.0 * (1.0 + top)
    zero_singular = bool(poles) and poles[0] <= 1e-12

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
        g = np.array([secular_derivative(d, float(s)) for s in grid])
        # Zero runs collapse to one representative, as in the dense path.
        in_run = False
        for i in range(samples_per_interval):
            if g[i] == 0.0:
                if not in_run:
                    roots.append((float(grid[i]), 0.0))
                in_run = True
            else:
                in_run = False
        for i in range(samples_per_interval - 1):
            gi, gj = g[i], g[i + 1]
            if gi == 0.0 or gj == 0.0:
                continue
            if gi * gj < 0.0:
                roots.append(_refine(d, float(grid[i]), float(grid[i + 1]),
                                     float(gi), float(gj), tol_root, max_iter))

    accepted: list[float] = []
    for sigma, g in sorted(roots):
        if sigma <= 0.0:
            continue
        if abs(g) > tol or sigma * abs(g) > tol:
            continue
        if accepted and sigma - accepted[-1] <= 1e-9 * (1.0 + sigma):
            continue
        accepted.append(sigma)

    points = [_point(d, s, tol_eig) for s in accepted]

    if not zero_singular:
        if secular_derivative(d, 0.0) <= tol:
            points.insert(0, _point(d, 0.0, tol_eig))

    points.sort(key=lambda cp: cp.sigma)
    return points
