"""Numerical verification laboratory for the zeros of generalized basic
hypergeometric polynomials: algebraic identities satisfied by the zeros, the
isospectral matrix whose eigenvalues are known in closed form, and the
dynamical system whose equilibria are the zeros themselves."""

from .errors import (
    CollisionDetected,
    ConfigError,
    ConsistencyWarning,
    DegenerateZeros,
    DegreeMismatch,
    EigenNoConvergence,
    IndexCollision,
    InvalidDegree,
    LengthMismatch,
    NoConvergence,
    NonGenericParameter,
    OverflowRisk,
    QZerosError,
    ReductionMismatch,
    ReductionTooDeep,
    RepeatedEigenvalue,
    StepUnderflow,
    ZeroLeadingCoefficient,
)
from .flow import (
    CoeffState,
    FlowState,
    TriangularC,
    build_C,
    equilibrium_residual,
    evolve_coeffs,
    fixed_point,
    flow_rhs,
    flow_rhs_from_products,
    integrate_flow,
    jacobian_fd,
)
from .isospectral import (
    IsoMatrix,
    SpectrumReport,
    build_M,
    certified_spectrum,
    closed_trace,
    eigenvalues,
    logdet_gap,
    match_spectrum,
    matrix_logdet,
    matrix_power_trace,
    mu_closed,
    mu_closed_exact,
)
from .params import ParamSet, SymFuncs, elem_sym, reduce, validate
from .precision import F64, PrecisionContext, extended, get_context
from .qdiff import (
    DilationOp,
    apply_Delta,
    apply_delta,
    expanded_residual,
    qde_expanded_agreement,
    qde_residual,
)
from .qseries import (
    Poly,
    coeffs_P,
    eval_phi,
    eval_poly,
    eval_poly_deriv,
    monic_prefactor,
    qpochhammer,
    to_monic,
)
from .rootfind import ZeroSet, companion_zeros, find_zeros
from .zero_algebra import (
    KernelCache,
    f_n,
    f_nm,
    g_n,
    prop1_residuals,
    prop1_residuals_qde,
    prop1_residuals_r1s1,
    shift_range,
)

__version__ = "0.1.0"

__all__ = [
    "CoeffState",
    "CollisionDetected",
    "ConfigError",
    "ConsistencyWarning",
    "DegenerateZeros",
    "DegreeMismatch",
    "DilationOp",
    "EigenNoConvergence",
    "F64",
    "FlowState",
    "IndexCollision",
    "InvalidDegree",
    "IsoMatrix",
    "KernelCache",
    "LengthMismatch",
    "NoConvergence",
    "NonGenericParameter",
    "OverflowRisk",
    "ParamSet",
    "Poly",
    "PrecisionContext",
    "QZerosError",
    "ReductionMismatch",
    "ReductionTooDeep",
    "RepeatedEigenvalue",
    "SpectrumReport",
    "StepUnderflow",
    "SymFuncs",
    "TriangularC",
    "ZeroLeadingCoefficient",
    "ZeroSet",
    "apply_Delta",
    "apply_delta",
    "build_C",
    "build_M",
    "certified_spectrum",
    "closed_trace",
    "coeffs_P",
    "companion_zeros",
    "eigenvalues",
    "elem_sym",
    "equilibrium_residual",
    "eval_phi",
    "eval_poly",
    "eval_poly_deriv",
    "evolve_coeffs",
    "expanded_residual",
    "extended",
    "f_n",
    "f_nm",
    "find_zeros",
    "fixed_point",
    "flow_rhs",
    "flow_rhs_from_products",
    "g_n",
    "get_context",
    "integrate_flow",
    "jacobian_fd",
    "logdet_gap",
    "match_spectrum",
    "matrix_logdet",
    "matrix_power_trace",
    "monic_prefactor",
    "mu_closed",
    "mu_closed_exact",
    "prop1_residuals",
    "prop1_residuals_qde",
    "prop1_residuals_r1s1",
    "qde_expanded_agreement",
    "qde_residual",
    "qpochhammer",
    "reduce",
    "shift_range",
    "to_monic",
    "validate",
]
