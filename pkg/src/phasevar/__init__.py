"""Minimum phase variances of single-mode optical states.

Computes the smallest measured phase variance achievable under heterodyne,
adaptive (mark I / mark II), canonical, and user-tabulated phase
measurement schemes, for states constrained by mean photon number, photon
number cutoff, or squeezed-state form; includes the matching asymptotic
laws, a large-photon-number continuum solver, and a sweep CLI.
"""

from .asymptotics import (
    perturbation_constants,
    reference_curves,
    vmin_general,
    vmin_truncated_asym,
    z_asymptote,
    z_markI_corrected,
    z_param,
)
from .continuum import ContinuumResult, discretize, solve_continuum, solve_continuum_at_nbar
from .errors import (
    BoundaryContaminationError,
    ConfigError,
    MissingTailError,
    PhaseVarError,
    PrecisionError,
    ResourceLimitError,
    SolverError,
    TableFormatError,
)
from .number_opt import (
    OptimizationResult,
    StateVector,
    build_tridiagonal,
    ground_pair,
    optimize_at_mu,
    optimize_at_nbar,
    optimize_truncated,
    variance_of_state,
)
from .schemes import (
    CANONICAL,
    HETERODYNE,
    MARK_I,
    MARK_II,
    SchemeModel,
    by_name,
    h,
    h_continuous,
    h_het_exact,
    h_het_series,
    leading_params,
    load_h_table,
    power_law,
)
from .squeezed import (
    SqueezedPoint,
    amplitudes,
    appendix_sum_check,
    optimize_squeezed,
    squeezed_variance,
)

__version__ = "0.1.0"

__all__ = [
    "SchemeModel",
    "CANONICAL",
    "HETERODYNE",
    "MARK_I",
    "MARK_II",
    "power_law",
    "by_name",
    "h",
    "h_continuous",
    "h_het_exact",
    "h_het_series",
    "leading_params",
    "load_h_table",
    "StateVector",
    "OptimizationResult",
    "build_tridiagonal",
    "ground_pair",
    "optimize_at_mu",
    "optimize_at_nbar",
    "optimize_truncated",
    "variance_of_state",
    "ContinuumResult",
    "discretize",
    "solve_continuum",
    "solve_continuum_at_nbar",
    "SqueezedPoint",
    "amplitudes",
    "squeezed_variance",
    "optimize_squeezed",
    "appendix_sum_check",
    "vmin_general",
    "vmin_truncated_asym",
    "z_param",
    "z_asymptote",
    "z_markI_corrected",
    "reference_curves",
    "perturbation_constants",
    "PhaseVarError",
    "TableFormatError",
    "MissingTailError",
    "SolverError",
    "ResourceLimitError",
    "BoundaryContaminationError",
    "PrecisionError",
    "ConfigError",
]
