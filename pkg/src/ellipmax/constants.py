"""Closed forms for the sharp half-space maximum-principle constants.

For the Dirichlet problem in R^n_+ the sharp constant in
|u| <= K * sup|boundary data| is

    K = sup_{|z|=1} int_{lower hemisphere} |M^T(sigma) z| dsigma.

For the kernel family M = (2/omega_n)((1-kappa) I + n kappa sigma sigma^T)
this evaluates to the one-dimensional integral

    K(n, kappa) = c_n * int_0^{pi/2}
        [(1-kappa)^2 + n kappa (n kappa - 2 kappa + 2) cos^2 t]^{1/2}
        sin^{n-2} t dt,
    c_n = 2 Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2)),

with K = 1 exactly for kappa = 0 and K > 1 otherwise.  Special cases have
their own closed forms (a Gamma ratio for Stokes, a complete elliptic
integral and a power series in the plane, a logarithmic expression for
n = 3), all implemented here and cross-checked against the integral.  The
gradient bound for biharmonic functions and the planar deformed-state
bound follow the same pattern with their own integrands.

Every operation returns a SharpConstantResult carrying the value, the
method used, an error estimate, and notes (for example when kappa < 0,
where sharpness is undocumented upstream).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import KAPPA_MIN
from .numerics import (
    DEFAULT_ABS_TOL_1D,
    QuadratureSpec,
    complete_elliptic_E,
    gamma,
    integrate_1d,
)

__all__ = [
    "SharpConstantResult",
    "lame_stokes_constant",
    "stokes_constant",
    "lame_constant_2d_elliptic",
    "lame_constant_2d_series",
    "series_terms_for",
    "lame_constant_3d_log",
    "biharmonic_gradient_constant",
    "planar_deformed_constant",
    "METHODS",
]

METHOD_INTEGRAL = "closed_form_1d_integral"
METHOD_GAMMA_RATIO = "gamma_ratio"
METHOD_ELLIPTIC = "elliptic_integral"
METHOD_SERIES = "power_series"
METHOD_LOG = "log_closed_form"
METHOD_HEMISPHERE = "hemisphere_sup_numeric"
METHOD_EXTREMAL = "extremal_boundary_numeric"

METHODS = (
    METHOD_INTEGRAL,
    METHOD_GAMMA_RATIO,
    METHOD_ELLIPTIC,
    METHOD_SERIES,
    METHOD_LOG,
    METHOD_HEMISPHERE,
    METHOD_EXTREMAL,
)

NEGATIVE_KAPPA_NOTE = "sharpness for kappa < 0 is undocumented upstream"


@dataclass(frozen=True)
class SharpConstantResult:
    """A sharp-constant value with provenance.

    value: the constant; always >= 1 for the constants in scope.
    method: one of METHODS.
    err_est: absolute error estimate (quadrature error, series remainder
             bound, or a few ulp for closed forms).
    metadata: free-form extras such as parameter echoes, notes, or the
              maximizing direction for numerical methods.
    """

    value: float
    method: str
    err_est: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.value >= 1.0 - 1e-12:
            raise ValueError(
                f"sharp constants in scope are >= 1; got {self.value!r} "
                f"(method {self.method})"
            )
        if not self.err_est >= 0.0:
            raise ValueError("err_est must be nonnegative")


def _prefactor(n: int) -> float:
    # normalized so that _prefactor(n) * int_0^{pi/2} sin^{n-2} = 1
    return 2.0 * gamma(n / 2.0) / (math.sqrt(math.pi) * gamma((n - 1) / 2.0))


def _check_n(n: int) -> None:
    if not (isinstance(n, int) and n >= 2):
        raise ValueError(f"space dimension must be an integer >= 2, got {n!r}")


def _kappa_metadata(kappa: float) -> dict:
    md: dict = {"kappa": kappa}
    if kappa < 0.0:
        md["notes"] = [NEGATIVE_KAPPA_NOTE]
    return md


def lame_stokes_constant(
    n: int,
    kappa: float,
    spec: QuadratureSpec | None = None,
) -> SharpConstantResult:
    """Sharp constant for the kernel family, by the 1-D integral form.

    Valid for any kappa in (-1/2, 1]; kappa = 0 gives exactly the harmonic
    normalization K = 1 and kappa = 1 the Stokes constant.
    """
    _check_n(n)
    if not KAPPA_MIN < kappa <= 1.0:
        raise ValueError(f"kappa={kappa} outside the admissible range ({KAPPA_MIN}, 1]")
    if spec is None:
        spec = QuadratureSpec(abs_tol=DEFAULT_ABS_TOL_1D)

    a = (1.0 - kappa) ** 2
    b = n * kappa * (n * kappa - 2.0 * kappa + 2.0)

    def integrand(t: np.ndarray) -> np.ndarray:
        ct = np.cos(t)
        st = np.sin(t)
        return np.sqrt(a + b * ct * ct) * st ** (n - 2)

    pref = _prefactor(n)
    raw, raw_err = integrate_1d(integrand, 0.0, math.pi / 2.0, spec)
    return SharpConstantResult(
        value=pref * raw,
        method=METHOD_INTEGRAL,
        err_est=pref * raw_err + 1e-15,
        metadata={"n": n, **_kappa_metadata(kappa)},
    )


def stokes_constant(n: int) -> SharpConstantResult:
    """Stokes sharp constant (2/sqrt(pi)) Gamma(n/2 + 1) / Gamma((n+1)/2).

    Equals 4/pi for n=2, 3/2 for n=3, 16/(3 pi) for n=4, and grows like
    sqrt(2 n / pi).
    """
    _check_n(n)
    value = 2.0 / math.sqrt(math.pi) * gamma(n / 2.0 + 1.0) / gamma((n + 1) / 2.0)
    return SharpConstantResult(
        value=value,
        method=METHOD_GAMMA_RATIO,
        err_est=4.0 * np.finfo(float).eps * value,
        metadata={"n": n},
    )


def lame_constant_2d_elliptic(kappa: float) -> SharpConstantResult:
    """Planar constant (2/pi)(1 + kappa) E(2 sqrt(kappa)/(1 + kappa)).

    kappa in [0, 1]; the modulus 2 sqrt(kappa)/(1+kappa) never exceeds 1.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"the elliptic form requires kappa in [0, 1], got {kappa}")
    modulus = 2.0 * math.sqrt(kappa) / (1.0 + kappa)
    value = 2.0 / math.pi * (1.0 + kappa) * complete_elliptic_E(modulus)
    return SharpConstantResult(
        value=value,
        method=METHOD_ELLIPTIC,
        err_est=1e-13,
        metadata={"n": 2, "kappa": kappa},
    )


def _series_coefficient(m: int) -> float:
    # ((2m-3)!! / (2^m m!))^2, with (-1)!! = 1, via the term ratio
    # c_m / c_{m-1} = ((2m-3)/(2m))^2 so that no intermediate overflows
    c = 1.0
    for j in range(1, m + 1):
        r = (2.0 * j - 3.0) / (2.0 * j)
        c *= r * r
    return c


def lame_constant_2d_series(kappa: float, terms: int) -> SharpConstantResult:
    """Planar constant by its power series in kappa.

    Partial sum 1 + sum_{m=1}^{terms-1} ((2m-3)!!/(2^m m!))^2 kappa^{2m};
    err_est is the rigorous remainder bound (first omitted term divided by
    1 - kappa^2, valid because the term ratio is below kappa^2).
    Requires kappa in [0, 1) and terms >= 1.
    """
    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"the series requires kappa in [0, 1), got {kappa}")
    if not (isinstance(terms, int) and terms >= 1):
        raise ValueError(f"terms must be an integer >= 1, got {terms!r}")
    value = 1.0
    term = 1.0  # c_m * kappa^(2m), starting at m = 0
    k2 = kappa * kappa
    for m in range(1, terms):
        r = (2.0 * m - 3.0) / (2.0 * m)
        term *= r * r * k2
        value += term
    r = (2.0 * terms - 3.0) / (2.0 * terms)
    bound = term * r * r * k2 / (1.0 - k2) if terms > 1 else 0.25 * k2 / (1.0 - k2)
    return SharpConstantResult(
        value=value,
        method=METHOD_SERIES,
        err_est=bound,
        metadata={"n": 2, "kappa": kappa, "terms": terms},
    )


def series_terms_for(kappa: float, tol: float, max_terms: int = 2000) -> int:
    """Smallest term count whose remainder bound is below tol."""
    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"the series requires kappa in [0, 1), got {kappa}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    k2 = kappa * kappa
    term = 1.0  # c_m * kappa^(2m) at m = 0
    for terms in range(1, max_terms + 1):
        r = (2.0 * terms - 3.0) / (2.0 * terms)
        bound = term * r * r * k2 / (1.0 - k2)
        if bound <= tol:
            return terms
        term *= r * r * k2
    return max_terms


def lame_constant_3d_log(kappa: float) -> SharpConstantResult:
    """Three-dimensional constant in logarithmic closed form.

    K = (1/2) [1 + 2 kappa
        + (1-kappa)^2 / sqrt(3 kappa (kappa+2))
          * log((1 + 2 kappa + sqrt(3 kappa (kappa+2))) / (1 - kappa))],
    kappa in [0, 1].  Writing s = sqrt(3 kappa (kappa+2)) and A = 1+2kappa,
    the identity A^2 - s^2 = (1-kappa)^2 turns the log term into
    (1-kappa)^2/A * atanh(s/A)/(s/A), which is evaluated through the series
    of atanh(x)/x near kappa = 0 (removable singularity) and degenerates to
    an exact 0 * log factor at kappa = 1, so both limit branches are taken
    without digit loss: K(0) = 1 and K(1) = 3/2.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"the log form requires kappa in [0, 1], got {kappa}")
    a_lin = 1.0 + 2.0 * kappa
    if kappa >= 1.0 - 1e-6:
        # near the Stokes limit the log factor is multiplied by (1-kappa)^2;
        # the direct product is stable and vanishes at kappa = 1 exactly
        eps = 1.0 - kappa
        s = math.sqrt(3.0 * kappa * (kappa + 2.0))
        log_term = 0.0 if eps == 0.0 else eps * eps / s * math.log((a_lin + s) / eps)
        value = 0.5 * (a_lin + log_term)
    else:
        x2 = 3.0 * kappa * (kappa + 2.0) / (a_lin * a_lin)  # (s/A)^2
        if kappa < 1e-6:
            # atanh(x)/x = 1 + x^2/3 + x^4/5 + ...
            h = 1.0 + x2 / 3.0 + x2 * x2 / 5.0
        else:
            x = math.sqrt(x2)
            h = math.atanh(x) / x
        value = 0.5 * (a_lin + (1.0 - kappa) ** 2 / a_lin * h)
    return SharpConstantResult(
        value=value,
        method=METHOD_LOG,
        err_est=1e-13,
        metadata={"n": 3, "kappa": kappa},
    )


def biharmonic_gradient_constant(
    n: int,
    spec: QuadratureSpec | None = None,
) -> SharpConstantResult:
    """Sharp constant bounding |grad u| on R^n_+ for biharmonic u.

    K = c_n * int_0^{pi/2} [4 + n(n-4) cos^2 t]^{1/2} sin^{n-2} t dt,
    equal to 4/pi for n=2, 1/2 + 2 pi sqrt(3)/9 for n=3, and 2 for n=4.
    """
    _check_n(n)
    if spec is None:
        spec = QuadratureSpec(abs_tol=DEFAULT_ABS_TOL_1D)
    b = float(n * (n - 4))

    def integrand(t: np.ndarray) -> np.ndarray:
        ct = np.cos(t)
        st = np.sin(t)
        return np.sqrt(4.0 + b * ct * ct) * st ** (n - 2)

    pref = _prefactor(n)
    raw, raw_err = integrate_1d(integrand, 0.0, math.pi / 2.0, spec)
    return SharpConstantResult(
        value=pref * raw,
        method=METHOD_INTEGRAL,
        err_est=pref * raw_err + 1e-15,
        metadata={"n": n},
    )


def planar_deformed_constant() -> SharpConstantResult:
    """Sharp bound 4/pi on sqrt(sigma_12^2 + sigma_22^2) in the half-plane.

    Coincides with stokes_constant(2); the value is taken from there so the
    two results agree bit for bit.
    """
    stokes2 = stokes_constant(2)
    return SharpConstantResult(
        value=stokes2.value,
        method=METHOD_INTEGRAL,
        err_est=stokes2.err_est,
        metadata={"n": 2, "coincides_with": "stokes_constant(2)"},
    )
