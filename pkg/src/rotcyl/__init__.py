"""Stability of columns of rotating cylindrical stationary surfaces.

Generating curves obey ``kappa = a r**2 + b``; a column of length ``l`` is
tested against closed-form necessary bounds, a per-axial-mode spectral
reduction and a full 2D constrained eigenvalue oracle.
"""
from ._kernels import BACKEND
from .config import RunConfig, SolverConfig
from .curves import (
    CurveScalars,
    GeneratingParams,
    OpenArc,
    PlanarCurve,
    circle_curve,
    curve_scalars,
    find_closed_curves,
    integrate_arc,
    q_profile,
    rotation_field,
    shoot_closed_curve,
    tangent_components,
)
from .errors import (
    BracketError,
    IntegrationError,
    InvariantViolation,
    NoConvergence,
    NoSignChange,
    NotApplicable,
    NumericalFailure,
)
from .spectral import (
    SLOperator,
    SpectrumSlice,
    assemble_sl_operator,
    constrained_min_eigenvalue,
    eigen_spectrum,
    jacobi_field_residual,
)
from .stability import (
    CylinderColumn,
    ModeAnalysis,
    StabilityReport,
    StrongerBound,
    Verdict,
    bound_comparison,
    build_report,
    full_form_min,
    mode_threshold,
    oracle_critical_length,
    per_mode_critical_length,
    phi_evaluate,
    proof_witness,
    theorem1_bound,
    theorem2_bound,
)

__version__ = "0.1.0"
