"""ellflow: elliptic operator-valued matrix flow engine.

Integrates the coupled quadratic flow ``delta' = 16 D D*``,
``D' = -2 (Ups D + D Ups^T)`` on finite-dimensional complex matrices,
audits its conserved and monotone quantities, extracts infinite-time
limits, and validates the induced diagonalization of fermionic quadratic
Hamiltonians by exact diagonalization on a small Fock space.
"""

from .asymptotics import (
    AsymptoticsResult,
    ScalarFlow,
    commutative_closed_form,
    fit_decay_rate,
    limit_operator,
    scalar_closed_form,
    scan_max_mu,
)
from .backend import BACKEND_NAME, HAVE_COMPILED, get_backend
from .flow import (
    dense_eval,
    evolve_V,
    evolve_W,
    hs_norm_sq_integral,
    integrate,
    rhs,
    sample_grid,
)
from .fock import (
    FockModel,
    SpectralComparison,
    build_h0,
    jordan_wigner,
    make_model,
    number_operator,
    second_quantize_diagonal,
    validate,
)
from .invariants import (
    EllipseParams,
    InvariantReport,
    K_matrix,
    audit,
    commutative_motion_residual,
    ellipse_residual,
    elliptic_boundedness,
    frakB,
    frakD,
    motion_trace,
    zeta,
)
from .problem import (
    EvolutionOperator,
    FlowProblem,
    FlowState,
    IntegratorConfig,
    Symmetry,
    Trajectory,
    default_config,
)
from .scenarios import Scenario, generate, negative_cases

__version__ = "0.1.0"

__all__ = [
    "AsymptoticsResult",
    "BACKEND_NAME",
    "EllipseParams",
    "EvolutionOperator",
    "FlowProblem",
    "FlowState",
    "FockModel",
    "HAVE_COMPILED",
    "IntegratorConfig",
    "InvariantReport",
    "K_matrix",
    "ScalarFlow",
    "Scenario",
    "SpectralComparison",
    "Symmetry",
    "Trajectory",
    "audit",
    "build_h0",
    "commutative_closed_form",
    "commutative_motion_residual",
    "dense_eval",
    "default_config",
    "ellipse_residual",
    "elliptic_boundedness",
    "evolve_V",
    "evolve_W",
    "fit_decay_rate",
    "frakB",
    "frakD",
    "generate",
    "get_backend",
    "hs_norm_sq_integral",
    "integrate",
    "jordan_wigner",
    "limit_operator",
    "make_model",
    "motion_trace",
    "negative_cases",
    "number_operator",
    "rhs",
    "sample_grid",
    "scalar_closed_form",
    "scan_max_mu",
    "second_quantize_diagonal",
    "validate",
    "zeta",
]
