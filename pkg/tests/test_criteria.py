"""Tests for the maximum modulus principle criteria.

Sign convention used throughout: the coefficient matrices describe

    sum_jk A2[j][k] d_j d_k u - sum_j A1[j] d_j u - A0 u = 0,

so a positive-definite A0 is a damping term (principle can hold) and a
negative-definite A0 pushes energy in (principle fails for strong enough
negativity).
"""
import math

import numpy as np
import pytest

from ellipmax.criteria import (
    CoefficientSystem,
    check_condition_ii,
    check_mmp,
    check_mmp_many,
    check_strong_ellipticity,
    complexify,
    factor_principal_part,
    lame_system,
    laplacian_system,
    stokes_velocity_pressure_system,
)


def _identity_a2(m, n, dtype=float):
    a2 = np.zeros((n, n, m, m), dtype=dtype)
    for j in range(n):
        a2[j, j] = np.eye(m, dtype=dtype)
    return a2


def _random_factorized(rng, m, n, field="real"):
    """A2[j][k] = a_jk * A with both factors positive definite."""
    g = rng.normal(size=(n, n))
    a = g @ g.T + n * np.eye(n)
    if field == "complex":
        h = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        A = h @ h.conj().T + m * np.eye(m)
    else:
        h = rng.normal(size=(m, m))
        A = h @ h.T + m * np.eye(m)
    a2 = np.einsum("jk,pq->jkpq", a, A)
    return a2, A, a


class TestCoefficientSystem:
    def test_symmetrizes_a2(self):
        a2 = _identity_a2(1, 2)
        a2[0, 1] = [[2.0]]
        a2[1, 0] = [[0.0]]
        sys_ = CoefficientSystem(m=1, n=2, field="real", A2=a2)
        assert sys_.A2[0, 1, 0, 0] == 1.0
        assert sys_.A2[1, 0, 0, 0] == 1.0

    def test_defaults_lower_terms_to_zero(self):
        sys_ = CoefficientSystem(m=2, n=2, field="real", A2=_identity_a2(2, 2))
        assert not sys_.A1.any()
        assert not sys_.A0.any()

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            CoefficientSystem(m=2, n=2, field="real", A2=np.zeros((2, 2, 3, 3)))
        with pytest.raises(ValueError):
            CoefficientSystem(
                m=1, n=2, field="real", A2=_identity_a2(1, 2), A1=np.zeros((3, 1, 1))
            )

    def test_field_validation(self):
        with pytest.raises(ValueError):
            CoefficientSystem(m=1, n=2, field="rational", A2=_identity_a2(1, 2))
        with pytest.raises(ValueError):
            CoefficientSystem(
                m=1, n=2, field="real", A2=_identity_a2(1, 2) * (1.0 + 1j)
            )

    def test_scale_positive(self):
        sys_ = CoefficientSystem(m=1, n=2, field="real", A2=_identity_a2(1, 2))
        assert sys_.scale() == pytest.approx(1.0)


class TestStrongEllipticity:
    def test_laplacian(self):
        res = check_strong_ellipticity(laplacian_system(2, 2))
        assert res.ok
        assert res.min_eigenvalue == pytest.approx(1.0, abs=1e-9)

    def test_lame(self):
        res = check_strong_ellipticity(lame_system(1.0, 1.0, 3))
        assert res.ok
        # symbol eigenvalues are mu and lam + 2 mu
        assert res.min_eigenvalue == pytest.approx(1.0, abs=1e-9)

    def test_stokes_velocity_pressure_degenerate(self):
        res = check_strong_ellipticity(stokes_velocity_pressure_system(1.0, 3))
        assert not res.ok
        assert abs(res.min_eigenvalue) < 1e-12
        assert res.witness_sigma is not None
        assert res.witness_zeta is not None

    def test_indefinite_witness(self):
        a2 = _identity_a2(1, 2)
        a2[1, 1] = [[-1.0]]
        res = check_strong_ellipticity(CoefficientSystem(m=1, n=2, field="real", A2=a2))
        assert not res.ok
        sigma = res.witness_sigma
        # the violating direction concentrates on the negative axis
        assert abs(sigma[1]) > abs(sigma[0])

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            check_strong_ellipticity(laplacian_system(1, 2), samples=50)

    def test_imaginary_laplacian_rejected(self):
        sys_ = laplacian_system(1, 2, coefficient=1j)
        res = check_strong_ellipticity(sys_)
        assert not res.ok


class TestFactorization:
    def test_laplacian(self):
        res = factor_principal_part(laplacian_system(2, 2))
        assert res.holds
        np.testing.assert_allclose(res.a, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(res.A, np.eye(2), atol=1e-12)

    def test_lame_fails(self):
        res = factor_principal_part(lame_system(1.0, 1.0, 3))
        assert not res.holds
        assert res.residual > 0.3

    def test_stokes_velocity_pressure_fails_pd(self):
        # the blocks factor perfectly (residual 0) over diag(1,..,1,0),
        # which is not positive definite
        res = factor_principal_part(stokes_velocity_pressure_system(1.0, 3))
        assert not res.holds
        assert res.residual < 1e-14
        assert "positive definite" in res.reason

    def test_round_trip_50(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            m = int(rng.integers(1, 4))
            n = int(rng.integers(2, 5))
            a2, A, a = _random_factorized(rng, m, n)
            sys_ = CoefficientSystem(m=m, n=n, field="real", A2=a2)
            res = factor_principal_part(sys_)
            assert res.holds
            assert res.residual < 1e-10
            assert np.trace(res.a) == pytest.approx(n, rel=1e-12)
            # the product reconstructs the blocks
            rebuilt = np.einsum("jk,pq->jkpq", res.a, res.A)
            np.testing.assert_allclose(rebuilt, sys_.A2, atol=1e-10 * sys_.scale())
            # a is recovered up to the trace normalization
            np.testing.assert_allclose(res.a, a * (n / np.trace(a)), atol=1e-10)


class TestConditionTwo:
    def test_no_lower_terms_boundary(self):
        sys_ = laplacian_system(2, 2)
        res = check_condition_ii(sys_, np.eye(2), np.eye(2))
        assert res.status == "holds_boundary"
        assert abs(res.min_value) < 1e-12

    def test_hand_computed_minimum(self):
        # A = I, a = I, A1[0] = [[0,1],[0,0]]: Q(zeta) on the unit circle is
        # (z1 z2)^2 - z1^2 with minimum -1 at zeta = (+-1, 0)
        a1 = np.zeros((2, 2, 2))
        a1[0] = [[0.0, 1.0], [0.0, 0.0]]
        sys_ = CoefficientSystem(m=2, n=2, field="real", A2=_identity_a2(2, 2), A1=a1)
        res = check_condition_ii(sys_, np.eye(2), np.eye(2))
        assert res.status == "fails"
        assert res.min_value == pytest.approx(-1.0, abs=1e-8)
        assert abs(res.witness[0]) == pytest.approx(1.0, abs=1e-4)

    def test_damping_shifts_minimum(self):
        # adding A0 = t*A shifts Q by exactly 4t
        a1 = np.zeros((2, 2, 2))
        a1[0] = [[0.0, 1.0], [0.0, 0.0]]
        for t, status in [(0.3, "holds"), (0.25, "holds_boundary"), (0.2, "fails")]:
            sys_ = CoefficientSystem(
                m=2, n=2, field="real", A2=_identity_a2(2, 2), A1=a1, A0=t * np.eye(2)
            )
            res = check_condition_ii(sys_, np.eye(2), np.eye(2))
            assert res.status == status, (t, res.status, res.min_value)
            assert res.min_value == pytest.approx(-1.0 + 4.0 * t, abs=1e-7)

    def test_scalar_boundary_equality(self):
        # c = 1, c_1 = 2i, c_0 = 1: the inequality 4 Re(c0) >= Im(c1)^2 reads
        # 4 >= 4, a boundary case
        a1 = np.zeros((2, 1, 1), dtype=complex)
        a1[0] = [[2.0j]]
        sys_ = CoefficientSystem(
            m=1,
            n=2,
            field="complex",
            A2=_identity_a2(1, 2, dtype=complex),
            A1=a1,
            A0=np.array([[1.0 + 0.0j]]),
        )
        res = check_condition_ii(sys_, np.eye(1, dtype=complex), np.eye(2))
        assert res.status == "holds_boundary"
        assert abs(res.min_value) < 1e-9

    def test_scalar_inequality_fails(self):
        # same with c_0 = 0.9: 3.6 < 4, fails with minimum -0.4
        a1 = np.zeros((2, 1, 1), dtype=complex)
        a1[0] = [[2.0j]]
        sys_ = CoefficientSystem(
            m=1,
            n=2,
            field="complex",
            A2=_identity_a2(1, 2, dtype=complex),
            A1=a1,
            A0=np.array([[0.9 + 0.0j]]),
        )
        res = check_condition_ii(sys_, np.eye(1, dtype=complex), np.eye(2))
        assert res.status == "fails"
        assert res.min_value == pytest.approx(-0.4, abs=1e-9)
        assert res.witness is not None
        assert np.linalg.norm(res.witness) == pytest.approx(1.0, abs=1e-9)


class TestComplexify:
    def test_real_embedding_block_diagonal(self):
        sys_ = laplacian_system(2, 2, coefficient=complex(3.0), field="complex")
        doubled = complexify(sys_)
        assert doubled.field == "real"
        assert doubled.m == 4
        np.testing.assert_allclose(
            doubled.A2[0, 0], 3.0 * np.eye(4), atol=1e-15
        )

    def test_imaginary_laplacian_blocks(self):
        sys_ = laplacian_system(1, 2, coefficient=1j)
        doubled = complexify(sys_)
        np.testing.assert_allclose(
            doubled.A2[0, 0], np.array([[0.0, -1.0], [1.0, 0.0]]), atol=1e-15
        )
        # the doubled system is not strongly elliptic either
        assert not check_strong_ellipticity(doubled).ok

    def test_rejects_real_input(self):
        with pytest.raises(ValueError):
            complexify(laplacian_system(1, 2))


class TestCheckMMP:
    def test_laplacian_holds_boundary(self):
        verdict = check_mmp(laplacian_system(2, 2))
        assert verdict.overall
        assert verdict.condition_ii.status == "holds_boundary"
        assert verdict.path == "real"
        assert any("smoothness" in note for note in verdict.notes)

    def test_heat_like_damped_holds(self):
        # A0 = I gives Q = 4 (zeta, zeta) > 0
        verdict = check_mmp(laplacian_system(2, 2, A0=np.eye(2)))
        assert verdict.overall
        assert verdict.condition_ii.status == "holds"
        assert verdict.condition_ii.min_value == pytest.approx(4.0, abs=1e-7)

    def test_scalar_real_drift_holds_boundary(self):
        a1 = np.zeros((2, 1, 1))
        a1[0] = [[3.0]]
        a1[1] = [[-1.5]]
        verdict = check_mmp(
            CoefficientSystem(m=1, n=2, field="real", A2=_identity_a2(1, 2), A1=a1)
        )
        assert verdict.overall
        assert abs(verdict.condition_ii.min_value) < 1e-9

    def test_lame_fails_condition_i(self):
        verdict = check_mmp(lame_system(1.0, 1.0, 3))
        assert not verdict.overall
        assert verdict.strongly_elliptic.ok
        assert not verdict.condition_i.holds
        assert verdict.condition_ii is None  # short-circuited

    def test_stokes_fails_ellipticity(self):
        verdict = check_mmp(stokes_velocity_pressure_system(1.0, 3))
        assert not verdict.overall
        assert not verdict.strongly_elliptic.ok
        assert verdict.condition_i is None

    def test_complex_paths_agree_on_scalar_case(self):
        a1 = np.zeros((2, 1, 1), dtype=complex)
        a1[0] = [[2.0j]]
        sys_ = CoefficientSystem(
            m=1,
            n=2,
            field="complex",
            A2=_identity_a2(1, 2, dtype=complex),
            A1=a1,
            A0=np.array([[0.9 + 0.0j]]),
        )
        direct = check_mmp(sys_, complex_path="direct")
        doubled = check_mmp(sys_, complex_path="doubled")
        assert direct.path == "complex-direct"
        assert doubled.path == "complex-doubled"
        assert not direct.overall and not doubled.overall
        assert direct.condition_ii.min_value == pytest.approx(
            doubled.condition_ii.min_value, abs=1e-9
        )

    def test_one_plus_i_laplacian_holds(self):
        verdict = check_mmp(laplacian_system(1, 2, coefficient=1.0 + 1.0j))
        assert verdict.overall

    def test_complex_paths_agree_randomized(self):
        rng = np.random.default_rng(7)
        agree = 0
        for _ in range(20):
            m = int(rng.integers(1, 4))
            n = int(rng.integers(2, 4))
            a2, _, _ = _random_factorized(rng, m, n, field="complex")
            a1 = 0.3 * (rng.normal(size=(n, m, m)) + 1j * rng.normal(size=(n, m, m)))
            a0 = 0.3 * (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m)))
            sys_ = CoefficientSystem(m=m, n=n, field="complex", A2=a2, A1=a1, A0=a0)
            direct = check_mmp(sys_, complex_path="direct")
            doubled = check_mmp(sys_, complex_path="doubled")
            same = direct.overall == doubled.overall
            if direct.condition_ii is not None and doubled.condition_ii is not None:
                same = same and direct.condition_ii.status == doubled.condition_ii.status
                same = same and abs(
                    direct.condition_ii.min_value - doubled.condition_ii.min_value
                ) <= 1e-6 * max(1.0, abs(direct.condition_ii.min_value))
            agree += same
        assert agree == 20

    def test_bad_complex_path(self):
        with pytest.raises(ValueError):
            check_mmp(laplacian_system(1, 2), complex_path="sideways")

    def test_check_many_conjunction(self):
        good = laplacian_system(1, 2)
        bad = lame_system(1.0, 1.0, 3)
        verdicts, overall = check_mmp_many([good, bad])
        assert len(verdicts) == 2
        assert not overall
        _, overall_good = check_mmp_many([good, good])
        assert overall_good
        with pytest.raises(ValueError):
            check_mmp_many([])


class TestInvariance:
    @staticmethod
    def _rotate(sys_, O):
        n, m = sys_.n, sys_.m
        a2 = np.einsum("jp,kq,jkab->pqab", O, O, sys_.A2)
        a1 = np.einsum("jp,jab->pab", O, sys_.A1)
        return CoefficientSystem(
            m=m, n=n, field=sys_.field, A2=a2, A1=a1, A0=sys_.A0
        )

    def test_scale_invariance(self):
        a1 = np.zeros((2, 2, 2))
        a1[0] = [[0.0, 1.0], [0.0, 0.0]]
        base = CoefficientSystem(
            m=2, n=2, field="real", A2=_identity_a2(2, 2), A1=a1, A0=0.3 * np.eye(2)
        )
        ref = check_mmp(base)
        fact_ref = factor_principal_part(base)
        for c in (0.5, 2.0, 10.0):
            scaled = CoefficientSystem(
                m=2, n=2, field="real", A2=c * base.A2, A1=c * base.A1, A0=c * base.A0
            )
            verdict = check_mmp(scaled)
            assert verdict.overall == ref.overall
            assert verdict.condition_ii.status == ref.condition_ii.status
            assert verdict.condition_ii.min_value == pytest.approx(
                ref.condition_ii.min_value, abs=1e-9
            )
            fact = factor_principal_part(scaled)
            np.testing.assert_allclose(fact.a, fact_ref.a, atol=1e-12)
            np.testing.assert_allclose(fact.A, c * fact_ref.A, atol=1e-12 * c)

    def test_rotation_invariance_five_systems(self):
        rng = np.random.default_rng(99)
        for i in range(5):
            m = int(rng.integers(1, 3))
            n = int(rng.integers(2, 4))
            a2, A, a = _random_factorized(rng, m, n)
            a1 = 0.5 * rng.normal(size=(n, m, m))
            # alternate between holding and failing systems
            shift = 0.5 if i % 2 == 0 else -2.0
            a0 = shift * A
            base = CoefficientSystem(m=m, n=n, field="real", A2=a2, A1=a1, A0=a0)
            q, _ = np.linalg.qr(rng.normal(size=(n, n)))
            rotated = self._rotate(base, q)
            v1 = check_mmp(base)
            v2 = check_mmp(rotated)
            assert v1.overall == v2.overall
            if v1.condition_ii is not None:
                assert v2.condition_ii is not None
                assert v1.condition_ii.min_value == pytest.approx(
                    v2.condition_ii.min_value, abs=1e-6
                )

    def test_soundness_margin_construction(self):
        # systems built to satisfy the inequality with margin 0.1 hold;
        # perturbing A0 against the margin by 0.2 flips the verdict
        rng = np.random.default_rng(5)
        for _ in range(5):
            m = int(rng.integers(1, 4))
            n = int(rng.integers(2, 4))
            a2, A, a = _random_factorized(rng, m, n)
            a1 = rng.normal(size=(n, m, m))
            bare = CoefficientSystem(m=m, n=n, field="real", A2=a2, A1=a1)
            fact = factor_principal_part(bare)
            assert fact.holds
            base_min = check_condition_ii(bare, fact.A, fact.a).min_value
            # A0 = t * A adds exactly 4t to the form
            t_hold = (0.1 - base_min) / 4.0
            holding = CoefficientSystem(
                m=m, n=n, field="real", A2=a2, A1=a1, A0=t_hold * fact.A
            )
            verdict = check_mmp(holding)
            assert verdict.overall
            assert verdict.condition_ii.min_value == pytest.approx(0.1, abs=1e-6)
            broken = CoefficientSystem(
                m=m, n=n, field="real", A2=a2, A1=a1, A0=(t_hold - 0.075) * fact.A
            )
            verdict2 = check_mmp(broken)
            assert not verdict2.overall
            assert verdict2.condition_ii.status == "fails"
            assert verdict2.condition_ii.min_value == pytest.approx(-0.2, abs=1e-6)
