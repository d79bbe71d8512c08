"""System descriptions and their half-space Poisson-type boundary kernels.

A system spec names one of the operators in scope together with its space
dimension and parameters.  For the second-order systems (harmonic, Lame,
Stokes) the solution of the Dirichlet problem in the half-space
R^n_+ = {x : x_n > 0} with boundary data f is

    u(x) = int_{x_n = 0} M((y - x)/|y - x|) * x_n / |y - x|^n * f(y') dy',

where M is an m x m matrix function of the unit direction sigma from x to
the boundary point.  The whole family is

    M(sigma) = (2/omega_n) * ((1 - kappa) I + n kappa sigma sigma^T),

with omega_n the surface measure of the unit (n-1)-sphere; kappa = 0 is the
scalar harmonic case (m = 1), kappa = (lam + mu)/(lam + 3 mu) the Lame
system, and kappa = 1 the Stokes system.  Integrating M over the lower
hemisphere gives the identity matrix for every kappa, which is the
normalization tests pin down.

The biharmonic and planar deformed-state entries exist for their sharp
constants only; they have no boundary kernel in scope and kernel_for
rejects them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import gamma

__all__ = ["SystemSpec", "KernelMatrix", "kernel_for", "omega_n"]

KIND_HARMONIC = "harmonic"
KIND_LAME = "lame"
KIND_STOKES = "stokes"
KIND_BIHARMONIC = "biharmonic-gradient"
KIND_PLANAR = "planar-deformed"

ALL_KINDS = (KIND_HARMONIC, KIND_LAME, KIND_STOKES, KIND_BIHARMONIC, KIND_PLANAR)

# kappa must exceed -1/2: the 3-D closed form needs
# (1-kappa)^2 + 3 kappa (kappa+2) = (2 kappa + 1)... > 0, which fails at -1/2.
KAPPA_MIN = -0.5


def omega_n(n: int) -> float:
    """Surface measure of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2)."""
    if n < 2:
        raise ValueError(f"omega_n requires n >= 2, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)


@dataclass(frozen=True)
class SystemSpec:
    """One of the systems in scope, with dimension and parameters.

    kind: one of "harmonic", "lame", "stokes", "biharmonic-gradient",
          "planar-deformed".
    n: space dimension (>= 2; forced to 2 for planar-deformed).
    lam, mu: Lame moduli when the system was built from them (else None).
    nu: Stokes viscosity; stored and validated but the kernel and the
        sharp constant do not depend on it.
    kappa: kernel parameter; derived as (lam+mu)/(lam+3mu) for Lame,
           0 for harmonic, 1 for Stokes.
    """

    kind: str
    n: int
    lam: float | None = None
    mu: float | None = None
    nu: float | None = None
    kappa: float | None = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        if not (isinstance(self.n, int) and self.n >= 2):
            raise ValueError(f"space dimension must be an integer >= 2, got {self.n}")
        if self.kind == KIND_PLANAR and self.n != 2:
            raise ValueError("planar-deformed is a planar system; n must be 2")

    @staticmethod
    def harmonic(n: int) -> "SystemSpec":
        return SystemSpec(kind=KIND_HARMONIC, n=n, kappa=0.0)

    @staticmethod
    def lame(
        n: int,
        lam: float | None = None,
        mu: float | None = None,
        kappa: float | None = None,
    ) -> "SystemSpec":
        """Lame system from moduli (lam, mu) or directly from kappa.

        Moduli must satisfy mu > 0 and lam + 2 mu > 0 (strong ellipticity);
        the derived kappa = (lam + mu)/(lam + 3 mu) must lie in (-1/2, 1).
        A directly supplied kappa may additionally be 1 (the Stokes limit).
        """
        if kappa is None:
            if lam is None or mu is None:
                raise ValueError("lame requires either (lam, mu) or kappa")
            if not mu > 0.0:
                raise ValueError(f"lame requires mu > 0, got mu={mu}")
            if not lam + 2.0 * mu > 0.0:
                raise ValueError(f"lame requires lam + 2*mu > 0, got lam={lam}, mu={mu}")
            kappa = (lam + mu) / (lam + 3.0 * mu)
            if not KAPPA_MIN < kappa < 1.0:
                raise ValueError(
                    f"derived kappa={kappa} outside the admissible range "
                    f"({KAPPA_MIN}, 1); the moduli are out of scope"
                )
        else:
            if lam is not None or mu is not None:
                raise ValueError("supply (lam, mu) or kappa, not both")
            if not KAPPA_MIN < kappa <= 1.0:
                raise ValueError(
                    f"kappa={kappa} outside the admissible range ({KAPPA_MIN}, 1]"
                )
        notes = ()
        if kappa < 0.0:
            notes = ("sharpness for kappa < 0 is undocumented upstream",)
        return SystemSpec(kind=KIND_LAME, n=n, lam=lam, mu=mu, kappa=float(kappa), notes=notes)

    @staticmethod
    def stokes(n: int, nu: float = 1.0) -> "SystemSpec":
        if not nu > 0.0:
            raise ValueError(f"stokes requires viscosity nu > 0, got {nu}")
        return SystemSpec(
            kind=KIND_STOKES,
            n=n,
            nu=nu,
            kappa=1.0,
            notes=("the constant does not depend on nu",),
        )

    @staticmethod
    def biharmonic(n: int) -> "SystemSpec":
        return SystemSpec(kind=KIND_BIHARMONIC, n=n)

    @staticmethod
    def planar_deformed() -> "SystemSpec":
        return SystemSpec(kind=KIND_PLANAR, n=2)


@dataclass(frozen=True)
class KernelMatrix:
    """Boundary kernel of a system: sigma on the unit sphere -> m x m matrix.

    eval: single direction, shape (n,) -> (m, m).
    eval_many: batch of directions, shape (N, n) -> (N, m, m).
    """

    m: int
    n: int
    eval: Callable[[np.ndarray], np.ndarray]
    eval_many: Callable[[np.ndarray], np.ndarray]


def kernel_for(spec: SystemSpec) -> KernelMatrix:
    """Boundary kernel for harmonic, Lame, or Stokes specs.

    Raises ValueError for specs without a kernel in scope
    (biharmonic-gradient, planar-deformed).
    """
    if spec.kind in (KIND_BIHARMONIC, KIND_PLANAR):
        raise ValueError(f"no boundary kernel in scope for system {spec.kind!r}")

    n = spec.n
    c = 2.0 / omega_n(n)

    if spec.kind == KIND_HARMONIC:

        def eval_one(sigma: np.ndarray) -> np.ndarray:
            return np.array([[c]])

        def eval_many(sigma: np.ndarray) -> np.ndarray:
            return np.full((sigma.shape[0], 1, 1), c)

        return KernelMatrix(m=1, n=n, eval=eval_one, eval_many=eval_many)

    kappa = spec.kappa
    if kappa is None:
        raise ValueError(f"spec {spec.kind!r} carries no kappa")
    diag = c * (1.0 - kappa)
    quad = c * n * kappa

    def eval_one(sigma: np.ndarray) -> np.ndarray:
        s = np.asarray(sigma, dtype=float)
        return diag * np.eye(n) + quad * np.outer(s, s)

    def eval_many(sigma: np.ndarray) -> np.ndarray:
        s = np.asarray(sigma, dtype=float)
        return diag * np.eye(n)[None, :, :] + quad * np.einsum("ni,nj->nij", s, s)

    return KernelMatrix(m=n, n=n, eval=eval_one, eval_many=eval_many)
