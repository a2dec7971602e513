"""Global minimization of (possibly nonconvex) quadratics over the Lorentz cone.

The primal problem ``min 0.5*x'Qx - c'x`` over ``{x : ||x[1:]|| <= x[0]}``
is attacked through a one-dimensional dual in the multiplier sigma of the
quadratic cone reformulation.  Where the shifted Hessian
``Q + sigma*diag(-1,1,...,1)`` is positive definite the dual is concave and
its maximizer certifies a global primal minimum; elsewhere all dual KKT
points are enumerated and verified, and a brute-force grid oracle referees
optimality claims at desk scale.
"""

__version__ = "0.1.0"

from .model import (
    ProblemInstance,
    cone_quadratic,
    is_feasible,
    lagrangian,
    primal_objective,
    shifted_hessian,
)
from .linalg import (
    Factorization,
    SingularMatrixError,
    factorize,
    min_eigenvalue,
    pencil_singular_sigmas,
    solve_linear,
)
from .dual import (
    CERT_GLOBAL,
    CERT_HARD,
    CERT_KKT,
    CriticalPoint,
    DualInterval,
    HardCaseError,
    dual_derivative,
    dual_value,
    enumerate_kkt,
    hard_case_solve,
    maximize_dual,
    pd_interval,
    recover_primal,
)
from .secular import (
    DiagonalInstance,
    SecularPoleError,
    secular_derivative,
    secular_enumerate,
    secular_value,
)
from .verify import (
    KKTResiduals,
    OracleResult,
    brute_force_min,
    default_oracle_radius,
    duality_gap,
    kkt_check,
    projection_lorentz,
)
from .solver import (
    EXIT_CERTIFIED,
    EXIT_HARD_CASE,
    EXIT_NO_SOLUTION,
    EXIT_UNCERTIFIED,
    SolveReport,
    Tolerances,
    solve_problem,
    sweep_table,
)
from .fileio import (
    ProblemFormatError,
    as_dense,
    gen_instance,
    load_problem,
    parse_problem,
)

__all__ = [
    "__version__",
    "ProblemInstance", "DiagonalInstance",
    "cone_quadratic", "primal_objective", "is_feasible", "shifted_hessian", "lagrangian",
    "Factorization", "SingularMatrixError", "factorize", "solve_linear",
    "min_eigenvalue", "pencil_singular_sigmas",
    "CERT_GLOBAL", "CERT_KKT", "CERT_HARD",
    "CriticalPoint", "DualInterval", "HardCaseError",
    "dual_value", "dual_derivative", "pd_interval", "maximize_dual",
    "enumerate_kkt", "recover_primal", "hard_case_solve",
    "SecularPoleError", "secular_value", "secular_derivative", "secular_enumerate",
    "KKTResiduals", "OracleResult", "kkt_check", "duality_gap",
    "projection_lorentz", "brute_force_min", "default_oracle_radius",
    "SolveReport", "Tolerances", "solve_problem", "sweep_table",
    "EXIT_CERTIFIED", "EXIT_UNCERTIFIED", "EXIT_HARD_CASE", "EXIT_NO_SOLUTION",
    "ProblemFormatError", "parse_problem", "load_problem", "as_dense", "gen_instance",
]
