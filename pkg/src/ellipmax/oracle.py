"""Independent numerical routes to the sharp constants.

Two routes, both blind to the closed forms in ``constants``:

1. ``hemisphere_sup``: compute sup_{|z|=1} of the lower-hemisphere integral
   of |M^T(sigma) z| directly from the kernel, by grid search plus local
   refinement over z with honest quadrature underneath.

2. the extremal-data route: build the boundary data that saturates the
   bound, f(y') = M^T(sigma(y')) z / |M^T(sigma(y')) z| with sigma(y') the
   unit vector from the observation point x to the boundary point (y', 0),
   and evaluate the solution component (u(x), z) as an integral over the
   truncated boundary disk |y' - x'| <= R.  For extremal f this reproduces
   the constant up to the neglected tail.

Tail bound.  With C = sup_sigma |M^T(sigma) z| over the lower hemisphere,
the neglected integral over |y' - x'| > R is at most C times the kernel
mass of that region.  The substitution y' = x' + x_n tan(psi) omega maps
the boundary measure x_n/|y-x|^n dy' exactly onto the hemisphere measure,
and the outer region onto the near-equator cap psi > arctan(R/x_n), whose
measure is exact:

    n = 2: 2 (pi/2 - arctan(R/x_n)),
    n = 3: 2 pi x_n / sqrt(x_n^2 + R^2),

both below (n-1) pi x_n / R.  C itself is bounded by sampling the
hemisphere densely and adding a 5% safety margin; the reported err_est is
quadrature tolerance + tail bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import METHOD_EXTREMAL, METHOD_HEMISPHERE, SharpConstantResult
from .kernels import KernelMatrix, SystemSpec, kernel_for
from .numerics import (
    DEFAULT_ABS_TOL_HEMISPHERE,
    QuadratureSpec,
    fibonacci_sphere,
    integrate_1d,
    integrate_hemisphere,
    maximize_on_sphere,
)

__all__ = [
    "ExtremalProbe",
    "hemisphere_sup",
    "extremal_boundary_data",
    "evaluate_solution_component",
    "kernel_direction_bound",
]

DEFAULT_TRUNCATION_FACTOR = 1e4


@dataclass(frozen=True)
class ExtremalProbe:
    """Where and how the extremal-data route evaluates the solution.

    x: observation point in the open half-space (x[-1] > 0).
    z: unit direction in component space R^m the bound is tested along.
    truncation_radius: boundary integral runs over |y' - x'| <= R.
    """

    x: np.ndarray
    z: np.ndarray
    truncation_radius: float

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        z = np.asarray(self.z, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        if x.ndim != 1 or x.shape[0] < 2:
            raise ValueError("observation point must be a vector in R^n, n >= 2")
        if not x[-1] > 0.0:
            raise ValueError(f"observation point must satisfy x_n > 0, got x_n={x[-1]}")
        if z.ndim != 1 or not math.isclose(float(np.linalg.norm(z)), 1.0, abs_tol=1e-9):
            raise ValueError("direction z must be a unit vector")
        if not self.truncation_radius > 10.0 * x[-1]:
            raise ValueError(
                f"truncation radius {self.truncation_radius} too small; "
                f"needs R > 10 * x_n = {10.0 * x[-1]}"
            )


def _transpose_apply_norms(kernel: KernelMatrix, sigma: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|M^T(sigma) z| for a batch of directions sigma, shape (N,)."""
    mats = kernel.eval_many(sigma)
    vecs = np.einsum("nji,j->ni", mats, z)
    return np.linalg.norm(vecs, axis=1)


def kernel_direction_bound(kernel: KernelMatrix, z: np.ndarray) -> float:
    """Sampled upper bound on sup_sigma |M^T(sigma) z| over the lower hemisphere.

    Dense deterministic sampling plus a 5% safety margin; used only inside
    tail bounds, never as a computed constant.
    """
    n = kernel.n
    if n == 2:
        t = np.linspace(math.pi, 2.0 * math.pi, 4001)
        sigma = np.stack([np.cos(t), np.sin(t)], axis=-1)
    elif n == 3:
        sigma = fibonacci_sphere(8000)
        sigma = sigma[sigma[:, 2] <= 0.0]
    else:
        raise ValueError(f"hemisphere sampling supports n in {{2, 3}}, got n={n}")
    return 1.05 * float(np.max(_transpose_apply_norms(kernel, sigma, z)))


def _hemisphere_integral_fixed_grid(
    kernel: KernelMatrix, n_theta: int, n_phi: int
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed product grid (points, weights) on the lower hemisphere, n = 3.

    Gauss-Legendre in the polar angle from -e_3, midpoint in azimuth.
    Used only to rank candidate directions; accurate values come from the
    adaptive cubature.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.25 * math.pi * (x + 1.0)
    w_theta = 0.25 * math.pi * w
    phi = (np.arange(n_phi) + 0.5) * (2.0 * math.pi / n_phi)
    st = np.sin(theta)
    ct = np.cos(theta)
    pts = np.empty((n_theta * n_phi, 3))
    pts[:, 0] = (st[:, None] * np.cos(phi)[None, :]).ravel()
    pts[:, 1] = (st[:, None] * np.sin(phi)[None, :]).ravel()
    pts[:, 2] = np.repeat(-ct, n_phi)
    wts = (w_theta * st)[:, None].repeat(n_phi, axis=1).ravel() * (2.0 * math.pi / n_phi)
    return pts, wts


def hemisphere_sup(
    spec: SystemSpec,
    spec_quad: QuadratureSpec | None = None,
    coarse_points: int | None = None,
) -> SharpConstantResult:
    """Sharp constant as sup over directions z of the hemisphere integral.

    Knows nothing about the closed forms: only the kernel is used.  For
    n = 2 the supremum is taken by grid + golden-section search with the
    adaptive half-circle integral as objective.  For n = 3 a per-candidate
    adaptive cubature is unaffordable inside the direction search, so the
    search runs on a fixed cubature grid (vectorized over the whole
    direction lattice, then golden-section refinement on the same grid)
    and the refined argmax is polished with a few adaptive-cubature
    evaluations; the reported value is an actually-evaluated adaptive
    integral, hence a certified lower bound on the sup up to quadrature
    error.
    """
    kernel = kernel_for(spec)
    n, m = kernel.n, kernel.m
    if spec_quad is None:
        spec_quad = QuadratureSpec(abs_tol=DEFAULT_ABS_TOL_HEMISPHERE)

    def accurate(z: np.ndarray) -> float:
        zz = np.asarray(z, dtype=float)
        return integrate_hemisphere(
            lambda sigma: _transpose_apply_norms(kernel, sigma, zz), n, spec_quad
        )

    if m == 1:
        z = np.array([1.0])
        value = accurate(z)
        return SharpConstantResult(
            value=value,
            method=METHOD_HEMISPHERE,
            err_est=spec_quad.abs_tol,
            metadata={"n": n, "argmax": z.tolist()},
        )

    if n == 2 and m == 2:

        def objective(zs: np.ndarray) -> np.ndarray:
            return np.array([accurate(z) for z in np.atleast_2d(zs)])

        argmax, best = maximize_on_sphere(objective, m=2, coarse_points=coarse_points)
        return SharpConstantResult(
            value=best,
            method=METHOD_HEMISPHERE,
            err_est=spec_quad.abs_tol + 1e-7,
            metadata={"n": n, "argmax": argmax.tolist()},
        )

    if n == 3 and m == 3:
        pts, wts = _hemisphere_integral_fixed_grid(kernel, n_theta=96, n_phi=192)
        mats = kernel.eval_many(pts)  # (N, 3, 3)

        def ranked(zs: np.ndarray) -> np.ndarray:
            zs2 = np.atleast_2d(np.asarray(zs, dtype=float))
            out = np.empty(zs2.shape[0])
            for start in range(0, zs2.shape[0], 128):
                chunk = zs2[start : start + 128]
                vecs = np.einsum("nji,cj->nci", mats, chunk)
                out[start : start + 128] = wts @ np.linalg.norm(vecs, axis=2)
            return out

        z0, _ = maximize_on_sphere(ranked, m=3, coarse_points=coarse_points)

        # polish with the honest cubature around the fixed-grid argmax
        alpha = math.acos(min(1.0, max(-1.0, z0[2])))
        beta = math.atan2(z0[1], z0[0])

        def at(al: float, be: float) -> np.ndarray:
            sa = math.sin(al)
            return np.array([sa * math.cos(be), sa * math.sin(be), math.cos(al)])

        best_z, best_v = z0, accurate(z0)
        for delta in (1e-2, 2e-3):
            candidates = [
                (alpha + delta, beta),
                (alpha - delta, beta),
                (alpha, beta + delta),
                (alpha, beta - delta),
            ]
            for al, be in candidates:
                zc = at(min(max(al, 0.0), math.pi), be)
                v = accurate(zc)
                if v > best_v:
                    best_z, best_v = zc, v
                    alpha, beta = min(max(al, 0.0), math.pi), be
        return SharpConstantResult(
            value=best_v,
            method=METHOD_HEMISPHERE,
            err_est=spec_quad.abs_tol + 2e-7,
            metadata={"n": n, "argmax": np.asarray(best_z).tolist()},
        )

    raise ValueError(f"hemisphere_sup supports (n, m) with n in {{2, 3}}, got n={n}, m={m}")


def extremal_boundary_data(
    kernel: KernelMatrix, probe: ExtremalProbe
) -> Callable[[np.ndarray], np.ndarray]:
    """Boundary data saturating the bound at the probe's observation point.

    Returns a vectorized callable mapping boundary points (N, n-1) to unit
    vectors (N, m): f(y') = M^T(sigma) z / |M^T(sigma) z|, zero where the
    numerator vanishes.  |f| <= 1 everywhere by construction.
    """
    n, m = kernel.n, kernel.m
    x = probe.x
    z = probe.z
    if x.shape[0] != n:
        raise ValueError(f"observation point has dimension {x.shape[0]}, kernel has n={n}")
    if z.shape[0] != m:
        raise ValueError(f"direction z has dimension {z.shape[0]}, kernel has m={m}")
    scale = kernel_direction_bound(kernel, z)

    def data(yprime: np.ndarray) -> np.ndarray:
        yp = np.atleast_2d(np.asarray(yprime, dtype=float))
        diff = np.empty((yp.shape[0], n))
        diff[:, :-1] = yp - x[:-1]
        diff[:, -1] = -x[-1]
        dist = np.linalg.norm(diff, axis=1)
        sigma = diff / dist[:, None]
        vecs = np.einsum("nji,j->ni", kernel.eval_many(sigma), z)
        norms = np.linalg.norm(vecs, axis=1)
        out = np.zeros_like(vecs)
        ok = norms > 1e-13 * scale
        out[ok] = vecs[ok] / norms[ok, None]
        return out

    return data


def _tail_bound(kernel: KernelMatrix, probe: ExtremalProbe) -> float:
    c = kernel_direction_bound(kernel, probe.z)
    xn = float(probe.x[-1])
    r = probe.truncation_radius
    if kernel.n == 2:
        cap = 2.0 * (0.5 * math.pi - math.atan(r / xn))
    else:
        cap = 2.0 * math.pi * xn / math.hypot(xn, r)
    return c * cap


def evaluate_solution_component(
    kernel: KernelMatrix,
    probe: ExtremalProbe,
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec | None = None,
) -> tuple[float, float]:
    """(u(x), z) for boundary data f, over the truncated boundary disk.

    u(x) = int M(sigma(y')) x_n/|y-x|^n f(y') dy' with the disk
    |y' - x'| <= R.  The integral is computed under the angular
    substitution y' = x' + x_n tan(psi) omega (omega a unit vector in the
    boundary), which spreads the decaying kernel mass evenly in psi; the
    kernel factor and the substitution Jacobian are evaluated from the
    actual boundary points, not simplified analytically.  Returns
    (value, err_est) with err_est = quadrature tolerance + tail bound on
    the neglected region sup|f| * C * cap (see module docstring); for
    |f| <= 1 data this bounds the full-boundary value's distance.
    """
    n, m = kernel.n, kernel.m
    x = probe.x
    z = probe.z
    if x.shape[0] != n:
        raise ValueError(f"observation point has dimension {x.shape[0]}, kernel has n={n}")
    if z.shape[0] != m:
        raise ValueError(f"direction z has dimension {z.shape[0]}, kernel has m={m}")
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-6)
    xn = float(x[-1])
    psi_max = math.atan(probe.truncation_radius / xn)

    def contribution(yp: np.ndarray, jac: np.ndarray) -> np.ndarray:
        # z . M(sigma) f(y') * x_n / |y - x|^n * jacobian
        diff = np.empty((yp.shape[0], n))
        diff[:, :-1] = yp - x[:-1]
        diff[:, -1] = -xn
        dist = np.linalg.norm(diff, axis=1)
        sigma = diff / dist[:, None]
        mats = kernel.eval_many(sigma)
        fvals = np.atleast_2d(np.asarray(f(yp), dtype=float))
        zk = np.einsum("j,nji->ni", z, mats)
        return np.einsum("ni,ni->n", zk, fvals) * xn / dist**n * jac

    if n == 2:

        def integrand(psi: np.ndarray) -> np.ndarray:
            tan = np.tan(psi)
            jac = xn / np.cos(psi) ** 2  # dy' = x_n sec^2(psi) dpsi
            right = contribution((x[0] + xn * tan)[:, None], jac)
            left = contribution((x[0] - xn * tan)[:, None], jac)
            return right + left

        value, quad_err = integrate_1d(integrand, 0.0, psi_max, spec)
        return value, quad_err + _tail_bound(kernel, probe)

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

        def ray_integral(psis: np.ndarray) -> np.ndarray:
            out = np.empty_like(psis)
            for i, psi in enumerate(psis):
                tan = math.tan(psi)
                jac = xn * xn * tan / math.cos(psi) ** 2  # dy' = x_n^2 tan sec^2 dpsi dphi

                def ring(phis: np.ndarray) -> np.ndarray:
                    yp = np.stack(
                        [
                            x[0] + xn * tan * np.cos(phis),
                            x[1] + xn * tan * np.sin(phis),
                        ],
                        axis=-1,
                    )
                    return contribution(yp, jac)

                ring_val, _ = integrate_1d(ring, 0.0, 2.0 * math.pi, inner_spec)
                out[i] = ring_val
            return out

        value, quad_err = integrate_1d(ray_integral, 0.0, psi_max, outer_spec)
        return value, quad_err + spec.abs_tol + _tail_bound(kernel, probe)

    raise ValueError(f"boundary integration supports n in {{2, 3}}, got n={n}")
