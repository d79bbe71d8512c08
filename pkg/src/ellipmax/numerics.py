"""Quadrature and special-function primitives shared by the whole package.

The half-space sharp-constant formulas reduce to three numerical tasks:
one-dimensional integrals over [0, pi/2], integrals of kernel fields over
the lower unit hemisphere {|sigma| = 1, sigma_n < 0}, and suprema of
continuous functions over the unit sphere of directions.  This module
provides exactly those primitives plus the two special functions the
closed forms need:

* ``gamma`` and ``complete_elliptic_E`` (modulus convention,
  E(k) = int_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt),
* ``integrate_1d`` -- Gauss-Legendre quadrature, fixed-order or adaptive
  bisection, returning (value, err_est),
* ``integrate_hemisphere`` -- lower-hemisphere integration for n in {2, 3},
* ``maximize_on_sphere`` -- coarse grid plus golden-section refinement.

Integrand and objective callables are vectorized: they receive an (N,)
array of abscissas (or an (N, d) array of unit vectors) and return an
(N,) array of values.  All grids and summation orders are fixed, so
repeated calls with identical inputs produce identical floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "DEFAULT_ABS_TOL_1D",
    "DEFAULT_ABS_TOL_HEMISPHERE",
    "gamma",
    "complete_elliptic_E",
    "integrate_1d",
    "integrate_hemisphere",
    "maximize_on_sphere",
    "fibonacci_sphere",
]

# Default absolute tolerances: 1-D closed-form integrals are cheap and are
# pushed well below the 1e-10 acceptance comparisons; hemisphere cubature is
# the expensive path and 1e-8 keeps it comfortably inside the 1e-6 checks.
DEFAULT_ABS_TOL_1D = 1e-10
DEFAULT_ABS_TOL_HEMISPHERE = 1e-8

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # golden-section step ratio


@dataclass(frozen=True)
class QuadratureSpec:
    """How a 1-D integral is to be computed.

    rule: "adaptive" bisects until every panel meets its share of abs_tol;
          "gauss" is a single fixed-order panel (err_est still reported).
    abs_tol: absolute tolerance the adaptive rule drives the estimate below.
    max_subdivisions: bisection budget before QuadratureError is raised.
    order: Gauss-Legendre nodes per panel (error gauged against order//2).
    """

    rule: str = "adaptive"
    abs_tol: float = DEFAULT_ABS_TOL_1D
    max_subdivisions: int = 4000
    order: int = 15

    def __post_init__(self) -> None:
        if self.rule not in ("adaptive", "gauss"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if not self.abs_tol > 0.0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if self.order < 3:
            raise ValueError("order must be at least 3")


class QuadratureError(RuntimeError):
    """Adaptive subdivision ran out of budget.

    Carries the best estimate so callers can still inspect it.
    """

    def __init__(self, message: str, value: float, err_est: float):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


def gamma(x: float) -> float:
    """Gamma function for positive real arguments.

    Thin validating wrapper over the C library implementation, which is
    accurate to a few ulp on the range used here (prefactors with
    arguments in [1/2, n/2 + 1]).  Raises ValueError for x <= 0.
    """
    if not x > 0.0:
        raise ValueError(f"gamma requires x > 0, got {x}")
    return math.gamma(x)


def complete_elliptic_E(k: float) -> float:
    """Complete elliptic integral of the second kind, modulus convention.

    E(k) = int_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt for k in [0, 1], computed
    by the arithmetic-geometric mean iteration
        E = K * (1 - sum_j 2^{j-1} c_j^2),   c_0 = k,  c_j = (a_{j-1}-b_{j-1})/2,
    with exact endpoint values E(0) = pi/2 and E(1) = 1.  The iteration is
    stopped once c hits the rounding floor (c <= 4 eps a); iterating past
    that point feeds one-ulp noise into terms that grow like 2^j c^2.
    Absolute error is below 1e-14 on [0, 1].
    """
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"complete_elliptic_E requires k in [0, 1], got {k}")
    if k == 0.0:
        return math.pi / 2.0
    if k == 1.0:
        return 1.0
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    s = 0.5 * k * k
    pow2 = 1.0
    for _ in range(40):
        c = 0.5 * (a - b)
        if c <= 8.9e-16 * a:
            break
        s += pow2 * c * c
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        pow2 *= 2.0
    return math.pi / (2.0 * a) * (1.0 - s)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    try:
        return _GL_CACHE[order]
    except KeyError:
        nodes = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = nodes
        return nodes


def _panel_estimates(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    order: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre value and error estimate on a batch of panels.

    The error estimate per panel is |G_order - G_{order//2}|, both rules
    evaluated in one call to f.
    """
    x_hi, w_hi = _gl_nodes(order)
    x_lo, w_lo = _gl_nodes(max(order // 2, 2))
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    # (k, p_hi + p_lo) node matrix, one f call for both rules
    nodes = mid[:, None] + half[:, None] * np.concatenate([x_hi, x_lo])[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    p = len(x_hi)
    i_hi = half * (vals[:, :p] @ w_hi)
    i_lo = half * (vals[:, p:] @ w_lo)
    return i_hi, np.abs(i_hi - i_lo)


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
) -> tuple[float, float]:
    """Integrate the vectorized callable f over [a, b].

    Returns (value, err_est).  With rule="adaptive", panels are bisected
    until each one's error estimate is below its length-proportional share
    of spec.abs_tol, so the summed estimate is below spec.abs_tol; if the
    bisection budget runs out first, QuadratureError is raised carrying the
    best estimate.  With rule="gauss" a single fixed-order panel is used.
    The final sum runs over panels sorted by left endpoint, so the result
    is reproducible.
    """
    if spec is None:
        spec = QuadratureSpec()
    if not a < b:
        raise ValueError(f"integration interval is degenerate: [{a}, {b}]")

    if spec.rule == "gauss":
        v, e = _panel_estimates(f, np.array([a]), np.array([b]), spec.order)
        return float(v[0]), float(e[0])

    lo = np.array([a, 0.5 * (a + b)])
    hi = np.array([0.5 * (a + b), b])
    vals, errs = _panel_estimates(f, lo, hi, spec.order)
    total_len = b - a
    n_splits = 0
    while True:
        local_tol = spec.abs_tol * (hi - lo) / total_len
        active = errs > local_tol
        if not active.any():
            break
        if n_splits > spec.max_subdivisions:
            order = np.argsort(lo)
            value = float(np.sum(vals[order]))
            err = float(np.sum(errs))
            raise QuadratureError(
                f"no convergence after {n_splits} subdivisions "
                f"(estimate {value!r}, err_est {err:.3e})",
                value,
                err,
            )
        n_splits += int(active.sum())
        a_act, b_act = lo[active], hi[active]
        m_act = 0.5 * (a_act + b_act)
        new_lo = np.concatenate([a_act, m_act])
        new_hi = np.concatenate([m_act, b_act])
        new_vals, new_errs = _panel_estimates(f, new_lo, new_hi, spec.order)
        lo = np.concatenate([lo[~active], new_lo])
        hi = np.concatenate([hi[~active], new_hi])
        vals = np.concatenate([vals[~active], new_vals])
        errs = np.concatenate([errs[~active], new_errs])

    order = np.argsort(lo)
    return float(np.sum(vals[order])), float(np.sum(errs))


def integrate_hemisphere(
    g: Callable[[np.ndarray], np.ndarray],
    n: int,
    spec: QuadratureSpec | None = None,
) -> float:
    """Integrate g over the lower unit hemisphere {|sigma| = 1, sigma_n < 0}.

    g receives an (N, n) array of unit vectors and returns (N,) values.
    n = 2 parametrizes the half circle by angle; n = 3 uses nested adaptive
    quadrature, polar angle measured from -e_3 (so sigma_3 = -cos(theta))
    outside, azimuth inside.  The inner tolerance is 40x tighter than the
    outer one: the outer error estimator compares quadrature rules on inner
    values, so inner noise must sit well below the outer target or the
    estimator chases it forever.
    """
    if spec is None:
        spec = QuadratureSpec(abs_tol=DEFAULT_ABS_TOL_HEMISPHERE)
    if n == 2:

        def half_circle(t: np.ndarray) -> np.ndarray:
            sigma = np.stack([np.cos(t), np.sin(t)], axis=-1)
            return g(sigma)

        value, _ = integrate_1d(half_circle, math.pi, 2.0 * math.pi, spec)
        return value

    if n == 3:
        inner_spec = QuadratureSpec(
            rule="adaptive",
            abs_tol=spec.abs_tol / 40.0,
            max_subdivisions=spec.max_subdivisions,
            order=spec.order,
        )
        outer_spec = QuadratureSpec(
            rule=spec.rule,
            abs_tol=spec.abs_tol / 2.0,
            max_subdivisions=spec.max_subdivisions,
            order=spec.order,
        )

        def latitude_integral(thetas: np.ndarray) -> np.ndarray:
            out = np.empty_like(thetas)
            for i, theta in enumerate(thetas):
                st, ct = math.sin(theta), math.cos(theta)

                def ring(phis: np.ndarray) -> np.ndarray:
                    sigma = np.stack(
                        [
                            st * np.cos(phis),
                            st * np.sin(phis),
                            np.full_like(phis, -ct),
                        ],
                        axis=-1,
                    )
                    return g(sigma)

                ring_val, _ = integrate_1d(ring, 0.0, 2.0 * math.pi, inner_spec)
                out[i] = st * ring_val
            return out

        value, _ = integrate_1d(latitude_integral, 0.0, math.pi / 2.0, outer_spec)
        return value

    raise ValueError(f"hemisphere integration supports n in {{2, 3}}, got n={n}")


def fibonacci_sphere(count: int) -> np.ndarray:
    """Near-uniform lattice of `count` points on the unit 2-sphere."""
    i = np.arange(count, dtype=float)
    z = 1.0 - 2.0 * (i + 0.5) / count
    rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    phi = 2.0 * math.pi * i * _INVPHI
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _golden_max(
    fun: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
) -> tuple[float, float]:
    """Golden-section search for a maximum of fun on [lo, hi]."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = fun(c), fun(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    while hi - lo > tol:
        if fc < fd:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = fun(d)
            if fd > best_f:
                best_x, best_f = d, fd
        else:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = fun(c)
            if fc > best_f:
                best_x, best_f = c, fc
    return best_x, best_f


def maximize_on_sphere(
    h: Callable[[np.ndarray], np.ndarray],
    m: int,
    coarse_points: int | None = None,
) -> tuple[np.ndarray, float]:
    """Maximize h over the unit sphere in R^m, m in {2, 3}.

    h receives an (N, m) array of unit vectors and returns (N,) values.
    A coarse scan (angle grid of 720 for m=2, Fibonacci lattice of 2000
    for m=3 by default) locates the best cell; golden-section refinement
    (coordinate-wise in spherical angles for m=3) shrinks the bracket
    below 1e-6 radians.  Returns (argmax, max); the max is a value h
    actually took, hence a certified lower bound on the supremum.
    """
    if m == 2:
        count = 720 if coarse_points is None else int(coarse_points)
        if count < 8:
            raise ValueError("coarse_points must be at least 8")
        t = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
        grid = np.stack([np.cos(t), np.sin(t)], axis=-1)
        vals = np.asarray(h(grid), dtype=float)
        i = int(np.argmax(vals))
        best_t, best_f = float(t[i]), float(vals[i])

        def h_angle(tt: float) -> float:
            z = np.array([[math.cos(tt), math.sin(tt)]])
            return float(np.asarray(h(z), dtype=float)[0])

        step = 2.0 * math.pi / count
        x, fx = _golden_max(h_angle, best_t - step, best_t + step, 1e-6)
        if fx > best_f:
            best_t, best_f = x, fx
        argmax = np.array([math.cos(best_t), math.sin(best_t)])
        return argmax, best_f

    if m == 3:
        count = 2000 if coarse_points is None else int(coarse_points)
        if count < 16:
            raise ValueError("coarse_points must be at least 16")
        grid = fibonacci_sphere(count)
        vals = np.asarray(h(grid), dtype=float)
        i = int(np.argmax(vals))
        zb = grid[i]
        best_f = float(vals[i])

        alpha = math.acos(min(1.0, max(-1.0, zb[2])))  # polar angle
        beta = math.atan2(zb[1], zb[0])

        def point(al: float, be: float) -> np.ndarray:
            sa = math.sin(al)
            return np.array([sa * math.cos(be), sa * math.sin(be), math.cos(al)])

        def h_point(al: float, be: float) -> float:
            return float(np.asarray(h(point(al, be)[None, :]), dtype=float)[0])

        # lattice spacing ~ sqrt(4 pi / count); bracket two cells wide
        width = 2.0 * math.sqrt(4.0 * math.pi / count)
        for tol in (1e-3, 1e-5, 1e-6, 1e-6):
            al, fa = _golden_max(
                lambda v: h_point(v, beta),
                max(alpha - width, 0.0),
                min(alpha + width, math.pi),
                tol,
            )
            if fa > best_f:
                alpha, best_f = al, fa
            else:
                alpha = al
            be, fb = _golden_max(
                lambda v: h_point(alpha, v),
                beta - width,
                beta + width,
                tol,
            )
            if fb > best_f:
                beta, best_f = be, fb
            else:
                beta = be
            width = max(width * 0.25, 4.0 * tol)
        argmax = point(alpha, beta)
        final = h_point(alpha, beta)
        if final > best_f:
            best_f = final
        return argmax, best_f

    raise ValueError(f"sphere maximization supports m in {{2, 3}}, got m={m}")
