"""Tests for system specs and their boundary kernels."""
import math

import numpy as np
import pytest

from ellipmax.kernels import (
    KAPPA_MIN,
    KIND_BIHARMONIC,
    KIND_HARMONIC,
    KIND_LAME,
    KIND_PLANAR,
    KIND_STOKES,
    SystemSpec,
    kernel_for,
    omega_n,
)
from ellipmax.numerics import QuadratureSpec, integrate_hemisphere


class TestOmega:
    def test_known_values(self):
        assert omega_n(2) == pytest.approx(2.0 * math.pi, rel=1e-15)
        assert omega_n(3) == pytest.approx(4.0 * math.pi, rel=1e-15)
        assert omega_n(4) == pytest.approx(2.0 * math.pi**2, rel=1e-14)

    def test_rejects_low_dimension(self):
        with pytest.raises(ValueError):
            omega_n(1)


class TestSystemSpec:
    def test_harmonic(self):
        spec = SystemSpec.harmonic(3)
        assert spec.kind == KIND_HARMONIC
        assert spec.kappa == 0.0

    def test_lame_from_moduli(self):
        spec = SystemSpec.lame(3, lam=1.0, mu=1.0)
        assert spec.kappa == pytest.approx(0.5, rel=1e-15)
        assert spec.lam == 1.0 and spec.mu == 1.0

    def test_lame_moduli_gates(self):
        with pytest.raises(ValueError):
            SystemSpec.lame(3, lam=1.0, mu=0.0)
        with pytest.raises(ValueError):
            SystemSpec.lame(3, lam=-2.0, mu=1.0)
        # lam + 2 mu > 0 but the derived kappa falls below -1/2
        with pytest.raises(ValueError):
            SystemSpec.lame(3, lam=-1.99, mu=1.0)

    def test_lame_direct_kappa_gates(self):
        assert SystemSpec.lame(2, kappa=1.0).kappa == 1.0
        assert SystemSpec.lame(2, kappa=0.0).kappa == 0.0
        with pytest.raises(ValueError):
            SystemSpec.lame(2, kappa=1.0 + 1e-9)
        with pytest.raises(ValueError):
            SystemSpec.lame(2, kappa=KAPPA_MIN)
        with pytest.raises(ValueError):
            SystemSpec.lame(2, kappa=0.5, lam=1.0, mu=1.0)
        with pytest.raises(ValueError):
            SystemSpec.lame(2)

    def test_negative_kappa_is_flagged(self):
        spec = SystemSpec.lame(2, kappa=-0.25)
        assert spec.notes
        assert SystemSpec.lame(2, kappa=0.25).notes == ()

    def test_stokes(self):
        spec = SystemSpec.stokes(3)
        assert spec.kappa == 1.0 and spec.nu == 1.0
        assert any("nu" in note for note in spec.notes)
        with pytest.raises(ValueError):
            SystemSpec.stokes(3, nu=0.0)

    def test_planar_forces_n2(self):
        assert SystemSpec.planar_deformed().n == 2
        with pytest.raises(ValueError):
            SystemSpec(kind=KIND_PLANAR, n=3)

    def test_dimension_gate(self):
        with pytest.raises(ValueError):
            SystemSpec.harmonic(1)
        with pytest.raises(ValueError):
            SystemSpec(kind="heat", n=2)


class TestKernelFor:
    def test_harmonic_scalar(self):
        kernel = kernel_for(SystemSpec.harmonic(3))
        assert kernel.m == 1
        sigma = np.array([0.0, 0.0, -1.0])
        assert kernel.eval(sigma) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-15)

    def test_stokes_n3_at_pole(self):
        kernel = kernel_for(SystemSpec.stokes(3))
        mat = kernel.eval(np.array([0.0, 0.0, -1.0]))
        expect = np.zeros((3, 3))
        expect[2, 2] = 3.0 / (2.0 * math.pi)
        np.testing.assert_allclose(mat, expect, atol=1e-15)

    def test_lame_half_kappa_fixture(self):
        # lam = mu gives kappa = 1/2; at sigma = (0, -1) the kernel is
        # (1/pi) * diag(1/2, 3/2)
        kernel = kernel_for(SystemSpec.lame(2, kappa=0.5))
        mat = kernel.eval(np.array([0.0, -1.0]))
        np.testing.assert_allclose(
            mat, np.diag([0.5 / math.pi, 1.5 / math.pi]), atol=1e-15
        )

    def test_kappa_zero_collapses_to_harmonic(self):
        kernel = kernel_for(SystemSpec.lame(3, kappa=0.0))
        scalar = kernel_for(SystemSpec.harmonic(3))
        sigma = np.array([0.6, 0.0, -0.8])
        np.testing.assert_allclose(
            kernel.eval(sigma), scalar.eval(sigma) * np.eye(3), atol=1e-16
        )

    def test_even_in_sigma(self):
        kernel = kernel_for(SystemSpec.lame(3, kappa=0.7))
        sigma = np.array([0.48, 0.6, -0.64])
        np.testing.assert_allclose(kernel.eval(sigma), kernel.eval(-sigma), atol=1e-16)

    def test_eval_many_matches_eval(self):
        kernel = kernel_for(SystemSpec.stokes(2))
        t = np.linspace(math.pi, 2.0 * math.pi, 7)
        sigmas = np.stack([np.cos(t), np.sin(t)], axis=-1)
        batch = kernel.eval_many(sigmas)
        for i, sigma in enumerate(sigmas):
            np.testing.assert_allclose(batch[i], kernel.eval(sigma), atol=1e-15)

    def test_no_kernel_for_biharmonic_or_planar(self):
        with pytest.raises(ValueError, match="no boundary kernel"):
            kernel_for(SystemSpec.biharmonic(3))
        with pytest.raises(ValueError, match="no boundary kernel"):
            kernel_for(SystemSpec.planar_deformed())


@pytest.mark.parametrize(
    "spec",
    [
        SystemSpec.harmonic(2),
        SystemSpec.harmonic(3),
        SystemSpec.lame(2, kappa=0.5),
        SystemSpec.lame(3, kappa=0.5),
        SystemSpec.lame(3, kappa=-0.25),
        SystemSpec.stokes(2),
        SystemSpec.stokes(3),
    ],
    ids=lambda s: f"{s.kind}-n{s.n}-k{s.kappa}",
)
def test_hemisphere_integral_is_identity(spec):
    """The kernel integrates to the identity over the lower hemisphere."""
    kernel = kernel_for(spec)
    qspec = QuadratureSpec(abs_tol=1e-9 if spec.n == 2 else 1e-8)
    got = np.empty((kernel.m, kernel.m))
    for i in range(kernel.m):
        for j in range(kernel.m):
            got[i, j] = integrate_hemisphere(
                lambda s, i=i, j=j: kernel.eval_many(s)[:, i, j], spec.n, qspec
            )
    np.testing.assert_allclose(got, np.eye(kernel.m), atol=1e-7)
