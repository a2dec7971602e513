"""Dense symmetric linear algebra: factorization with inertia, solves,
extreme eigenvalues, and the singular shifts of det(Q + sigma*L) = 0.

Desk scale only (n up to a few hundred); everything is backed by LAPACK
through numpy/scipy.  Inertia comes from a Bunch-Kaufman LDL' factorization
so that tests can cross-check it against an independent eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import ProblemInstance

__all__ = [
    "SingularMatrixError",
    "Factorization",
    "factorize",
    "solve_linear",
    "min_eigenvalue",
    "pencil_singular_sigmas",
]

DEFAULT_TOL_EIG = 1e-10


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a solve hits a (numerically) singular shifted Hessian."""

    def __init__(self, message: str, sigma: float | None = None):
        super().__init__(message)
        self.sigma = sigma


@dataclass(frozen=True)
class Factorization:
    """Factored symmetric matrix with inertia (n_pos, n_zero, n_neg)."""

    G: np.ndarray
    inertia: tuple[int, int, int]
    tol_eig: float
    _lu: tuple | None

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def singular(self) -> bool:
        return self.inertia[1] > 0

    @property
    def positive_definite(self) -> bool:
        return self.inertia == (self.n, 0, 0)


def _ldl_block_eigenvalues(d: np.ndarray) -> np.ndarray:
    """Eigenvalues of the block-diagonal D from an LDL' factorization."""
    n = d.shape[0]
    vals = []
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            a, b, cc = d[i, i], d[i + 1, i], d[i + 1, i + 1]
            mean = 0.5 * (a + cc)
            rad = np.hypot(0.5 * (a - cc), b)
            vals.extend([mean - rad, mean + rad])
            i += 2
        else:
            vals.append(d[i, i])
            i += 1
    return np.asarray(vals)


def factorize(G: np.ndarray, tol_eig: float = DEFAULT_TOL_EIG) -> Factorization:
    """Symmetric-indefinite factorization reporting inertia.

    Eigen-signs are counted with a scale-free zero band
    ``|lambda| <= tol_eig * max(1, ||G||_inf)``.  Singularity is reported in
    the inertia, not raised; only subsequent solves raise.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    band = tol_eig * max(1.0, float(np.abs(G).sum(axis=1).max()))
    _, d, _ = scipy.linalg.ldl(G)
    vals = _ldl_block_eigenvalues(d)
    n_zero = int(np.sum(np.abs(vals) <= band))
    n_pos = int(np.sum(vals > band))
    n_neg = n - n_zero - n_pos
    lu = scipy.linalg.lu_factor(G) if n_zero == 0 else None
    return Factorization(G=G, inertia=(n_pos, n_zero, n_neg), tol_eig=tol_eig, _lu=lu)


def solve_linear(f: Factorization, rhs) -> np.ndarray:
    """Solve G x = rhs through a Factorization, with one refinement step.

    Raises SingularMatrixError on singular factorizations; those systems
    belong to the hard-case path instead.
    """
    if f._lu is None:
        raise SingularMatrixError(
            "shifted Hessian is singular; evaluate via the hard-case path instead"
        )
    rhs = np.asarray(rhs, dtype=float)
    x = scipy.linalg.lu_solve(f._lu, rhs)
    # One step of iterative refinement keeps the residual at noise level even
    # for moderately ill-conditioned shifts near the singular set.
    r = rhs - f.G @ x
    x = x + scipy.linalg.lu_solve(f._lu, r)
    return x


def min_eigenvalue(G: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    return float(np.linalg.eigvalsh(np.asarray(G, dtype=float))[0])


def pencil_singular_sigmas(p: ProblemInstance, tol: float = 1e-9) -> list[float]:
    """All real sigma >= 0 with det(Q + sigma * diag(-1,1,...,1)) = 0, sorted.

    Multiplicities are kept.  Computed as the real spectrum of -(L Q): with
    L^2 = I, Q + sigma*L = L (L Q + sigma*I), so the singular shifts are the
    negated real eigenvalues of L Q.
    """
    LQ = p.Q.copy()
    LQ[0, :] = -LQ[0, :]
    w = np.linalg.eigvals(LQ)
    scale = 1.0 + float(np.max(np.abs(p.Q)))
    # A loose realness filter keeps nearly-real pairs (possible at eigenvalue
    # collisions); an extra breakpoint is harmless downstream.
    real = w[np.abs(w.imag) <= 1e-7 * scale].real
    sig = -real
    sig = sig[sig >= -tol * scale]
    return sorted(float(max(s, 0.0)) for s in sig)
