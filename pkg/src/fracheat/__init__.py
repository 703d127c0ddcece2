"""Numerics for the fractional heat semigroup.

Evaluation of the fractional heat kernel through its radial Bessel profile,
a second-difference evaluator for the fractional Laplacian, a convolution
solver for the Cauchy problem under polynomial growth data, and structural
verifiers (maximum principle, convexity transport, ruled directions).
"""

from fracheat.specfun import (
    QuadratureConfig,
    IntegralResult,
    QuadratureError,
    gamma,
    bessel_j,
    check_bessel_recurrence,
    integrate_semi_infinite,
)
from fracheat.report import CheckRecord, VerificationReport
from fracheat.kernel import (
    AlphaTable,
    KernelParams,
    RadialProfileTable,
    alpha_coeffs,
    build_profile_table,
    d_f_radial,
    ell_limit,
    f_radial,
    heat_kernel,
    heat_kernel_fourier,
    kernel_gradient,
    kernel_mass,
    kernel_time_derivative,
    profile_table,
    verify_kernel_bounds,
)
from fracheat.families import (
    FunctionSpec,
    GrowthEnvelope,
    abs_power,
    affine,
    constant,
    cosine,
    gaussian,
    parse_spec,
    piecewise_linear_1d,
    ruled,
)
from fracheat.fraclap import (
    ClassificationResult,
    Definiteness,
    FracLapResult,
    classify_definiteness,
    frac_laplacian,
    riesz_constant,
    vanish_at_infinity_check,
)
from fracheat.solver import (
    EnvelopeTrace,
    GridSpec,
    SolutionField,
    classical_lifespan,
    envelope_propagate,
    initial_continuity_check,
    pde_residual,
    residual_with_estimate,
    solution_at,
    solve_canonical,
    solve_classical,
    time_derivative,
)
from fracheat.analysis import (
    ConvexityReport,
    RuledReport,
    classical_dichotomy_check,
    convexity_check,
    max_principle_check,
    monotonicity_check,
    ruled_check,
)
from fracheat.suites import SUITES

__version__ = "0.1.0"

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "QuadratureError",
    "gamma",
    "bessel_j",
    "check_bessel_recurrence",
    "integrate_semi_infinite",
    "CheckRecord",
    "VerificationReport",
    "AlphaTable",
    "KernelParams",
    "RadialProfileTable",
    "alpha_coeffs",
    "build_profile_table",
    "d_f_radial",
    "ell_limit",
    "f_radial",
    "heat_kernel",
    "heat_kernel_fourier",
    "kernel_gradient",
    "kernel_mass",
    "kernel_time_derivative",
    "profile_table",
    "verify_kernel_bounds",
    "FunctionSpec",
    "GrowthEnvelope",
    "abs_power",
    "affine",
    "constant",
    "cosine",
    "gaussian",
    "parse_spec",
    "piecewise_linear_1d",
    "ruled",
    "ClassificationResult",
    "Definiteness",
    "FracLapResult",
    "classify_definiteness",
    "frac_laplacian",
    "riesz_constant",
    "vanish_at_infinity_check",
    "EnvelopeTrace",
    "GridSpec",
    "SolutionField",
    "classical_lifespan",
    "envelope_propagate",
    "initial_continuity_check",
    "pde_residual",
    "residual_with_estimate",
    "solution_at",
    "solve_canonical",
    "solve_classical",
    "time_derivative",
    "ConvexityReport",
    "RuledReport",
    "classical_dichotomy_check",
    "convexity_check",
    "max_principle_check",
    "monotonicity_check",
    "ruled_check",
    "SUITES",
]
