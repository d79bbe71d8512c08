"""Sharp constants and maximum-principle criteria for elliptic systems in a half-space.

Library layout:

* ``numerics`` -- quadrature and special-function primitives,
* ``kernels`` -- system specs and their half-space boundary kernels,
* ``constants`` -- closed forms for the sharp constants,
* ``oracle`` -- independent numerical routes (hemisphere supremum, explicit
  extremal boundary data) that cross-verify the closed forms,
* ``criteria`` -- algebraic validity criteria for the classical maximum
  modulus principle for user-supplied systems,
* ``systems_io`` -- the JSON input format for criteria,
* ``cli`` -- the ``ellipmax`` command-line front end.
"""
from .constants import (
    SharpConstantResult,
    series_terms_for,
    biharmonic_gradient_constant,
    lame_constant_2d_elliptic,
    lame_constant_2d_series,
    lame_constant_3d_log,
    lame_stokes_constant,
    planar_deformed_constant,
    stokes_constant,
)
from .criteria import (
    CoefficientSystem,
    CriteriaVerdict,
    check_condition_ii,
    check_mmp,
    check_mmp_many,
    check_strong_ellipticity,
    complexify,
    factor_principal_part,
    laplacian_system,
    lame_system,
    stokes_velocity_pressure_system,
)
from .kernels import KernelMatrix, SystemSpec, kernel_for, omega_n
from .numerics import (
    QuadratureError,
    QuadratureSpec,
    complete_elliptic_E,
    gamma,
    integrate_1d,
    integrate_hemisphere,
    maximize_on_sphere,
)
from .oracle import (
    ExtremalProbe,
    evaluate_solution_component,
    extremal_boundary_data,
    hemisphere_sup,
)
from .systems_io import SchemaError, load_criteria_document, parse_criteria_document

__version__ = "0.1.0"

__all__ = [
    "SharpConstantResult",
    "SystemSpec",
    "KernelMatrix",
    "QuadratureSpec",
    "QuadratureError",
    "ExtremalProbe",
    "CoefficientSystem",
    "CriteriaVerdict",
    "gamma",
    "complete_elliptic_E",
    "integrate_1d",
    "integrate_hemisphere",
    "maximize_on_sphere",
    "kernel_for",
    "omega_n",
    "lame_stokes_constant",
    "stokes_constant",
    "lame_constant_2d_elliptic",
    "lame_constant_2d_series",
    "lame_constant_3d_log",
    "biharmonic_gradient_constant",
    "planar_deformed_constant",
    "hemisphere_sup",
    "extremal_boundary_data",
    "evaluate_solution_component",
    "check_strong_ellipticity",
    "factor_principal_part",
    "check_condition_ii",
    "check_mmp",
    "check_mmp_many",
    "complexify",
    "laplacian_system",
    "lame_system",
    "stokes_velocity_pressure_system",
    "series_terms_for",
    "SchemaError",
    "load_criteria_document",
    "parse_criteria_document",
    "__version__",
]
