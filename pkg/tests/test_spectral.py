"""Spectral model: operator families, multipliers, hypothesis checks."""

import math

import numpy as np
import pytest

from fracsteer.errors import DomainError, ModelValidationError
from fracsteer.gammafn import gamma
from fracsteer.special import ml
from fracsteer.spectral import (DelayFn, ModelSpec, NonlinearityFn,
                                SpectralState, apply_S_alpha, apply_T_alpha,
                                apply_control_multiplier, apply_semigroup,
                                apply_state_multiplier, synthesize_physical)


def _model(n=2, alpha=1.0, **kw):
    kw.setdefault("u0", SpectralState.zero(n))
    kw.setdefault("v0", SpectralState.zero(n))
    return ModelSpec(truncation=n, alpha=alpha, horizon=1.0, **kw)


class TestSpectralState:
    def test_norm_and_zero(self):
        u = SpectralState(np.array([3.0, 4.0]))
        assert u.truncation == 2
        assert u.norm() == pytest.approx(5.0)
        assert np.all(SpectralState.zero(3).coeffs == 0.0)


class TestDelayFn:
    def test_vocabulary(self):
        assert DelayFn("identity")(0.7) == 0.7
        assert DelayFn("scaled_sine", 2.0)(1.0) == pytest.approx(math.sin(0.5))
        assert DelayFn("constant_lag", 0.25)(0.1) == 0.0
        assert DelayFn("constant_lag", 0.25)(1.0) == pytest.approx(0.75)
        with pytest.raises(ModelValidationError):
            DelayFn("cubic")
        with pytest.raises(ModelValidationError):
            DelayFn("scaled_sine", 0.0)

    def test_inversion(self):
        d = DelayFn("scaled_sine", 2.0)
        for t in (0.1, 0.9, 2.0):
            assert d.invert(d(t)) == pytest.approx(t, rel=1e-12)
        assert d.invertible_on == pytest.approx(math.pi)
        with pytest.raises(DomainError):
            d.invert(1.5)
        with pytest.raises(DomainError):
            DelayFn("constant_lag", 0.5).invert(0.3)


class TestNonlinearityFn:
    def test_vocabulary_and_bounds(self):
        f = NonlinearityFn("bounded_tanh", 0.1)
        avg = np.array([0.3, -2.0])
        assert np.allclose(f(avg), 0.1 * np.tanh(avg))
        assert f.bound(4) == pytest.approx(0.2)
        assert NonlinearityFn("zero").bound(10) == 0.0
        assert NonlinearityFn("linear_feedback", -0.5).bound(10) == math.inf
        with pytest.raises(ModelValidationError):
            NonlinearityFn("cubic")


class TestModelValidation:
    def test_eigenvalue_count_checked(self):
        with pytest.raises(ModelValidationError):
            _model(n=3, eigenvalues=[1.0, 4.0])
        with pytest.raises(ModelValidationError):
            _model(n=2, eigenvalues=[1.0, -4.0])

    def test_default_eigenvalues_are_squares(self):
        m = _model(n=4)
        assert np.allclose(m.eigenvalues, [1.0, 4.0, 9.0, 16.0])

    def test_delay_bound_rejection(self):
        # sin(t/tau) > t near 0 when tau < 1
        with pytest.raises(ModelValidationError) as e:
            _model(state_delays=(DelayFn("scaled_sine", 0.5),),
                   state_multipliers=(np.ones(2),))
        assert e.value.hypothesis == "(H5)"

    def test_nonlocal_time_ordering(self):
        _model(nonlocal_terms=((0.1, 0.25), (0.05, 0.5)))
        with pytest.raises(ModelValidationError):
            _model(nonlocal_terms=((0.1, 0.5), (0.05, 0.25)))
        with pytest.raises(ModelValidationError):
            _model(nonlocal_terms=((0.1, 1.5),))

    def test_multiplier_count_checked(self):
        with pytest.raises(ModelValidationError):
            _model(control_delays=(DelayFn("identity"),),
                   control_multipliers=(np.ones(2), np.ones(2)))

    def test_nonlinearity_bound_enforced(self):
        m = _model(state_delays=(DelayFn("identity"),),
                   nonlinearity=NonlinearityFn("bounded_tanh", 0.1))
        out = m.evaluate_nonlinearity([np.array([0.5, -0.5])])
        assert np.linalg.norm(out) <= m.f_bound_total() + 1e-12
        assert np.all(m.evaluate_nonlinearity([]) == 0.0)


class TestOperatorFamilies:
    def test_semigroup_example(self):
        m = _model(n=2)
        u = apply_semigroup(m, 1.0, SpectralState(np.ones(2)))
        assert u.coeffs[0] == pytest.approx(0.36787944117144233, rel=1e-12)
        assert u.coeffs[1] == pytest.approx(0.018315638888734179, rel=1e-12)

    def test_semigroup_law(self):
        m = _model(n=5)
        u = SpectralState(np.array([1.0, -0.5, 0.3, 0.2, -0.1]))
        two_step = apply_semigroup(m, 0.4, apply_semigroup(m, 0.35, u))
        one_step = apply_semigroup(m, 0.75, u)
        assert np.allclose(two_step.coeffs, one_step.coeffs,
                           rtol=1e-12, atol=1e-15)

    def test_identity_at_time_zero(self):
        m = _model(n=3, alpha=0.6)
        u = SpectralState(np.array([1.0, 2.0, 3.0]))
        assert np.allclose(apply_S_alpha(m, 0.0, u).coeffs, u.coeffs)
        assert np.allclose(apply_T_alpha(m, 0.0, u).coeffs,
                           u.coeffs / gamma(0.6))

    def test_classical_limit_collapse(self):
        # at alpha = 1 both fractional families equal the semigroup
        m = _model(n=4, alpha=1.0)
        u = SpectralState(np.array([0.7, -0.2, 0.1, 0.4]))
        for t in (0.1, 0.5, 1.0):
            q = apply_semigroup(m, t, u).coeffs
            assert np.allclose(apply_S_alpha(m, t, u).coeffs, q,
                               rtol=1e-12, atol=1e-15)
            assert np.allclose(apply_T_alpha(m, t, u).coeffs, q,
                               rtol=1e-12, atol=1e-15)

    def test_half_order_factor(self):
        m = _model(n=1, alpha=0.5, eigenvalues=[1.0])
        u = apply_S_alpha(m, 1.0, SpectralState(np.ones(1)))
        # E_{1/2,1}(-1) = e * erfc(1)
        assert u.coeffs[0] == pytest.approx(math.e * math.erfc(1.0), rel=1e-9)

    def test_uniform_bounds(self):
        for a in (0.4, 0.7, 1.0):
            m = _model(n=8, alpha=a)
            for t in np.linspace(0.0, 1.0, 30):
                assert np.all(np.abs(m.s_alpha_factors(t)) <= 1.0 + 1e-14)
                assert np.all(np.abs(m.t_alpha_factors(t))
                              <= 1.0 / gamma(a) + 1e-14)

    def test_negative_time_rejected(self):
        m = _model(n=2)
        with pytest.raises(DomainError):
            apply_semigroup(m, -0.1, SpectralState(np.ones(2)))

    def test_truncation_mismatch_rejected(self):
        m = _model(n=2)
        with pytest.raises(ModelValidationError):
            apply_S_alpha(m, 0.5, SpectralState(np.ones(3)))


class TestMultipliers:
    def test_laplacian_default_state_multiplier(self):
        m = _model(n=3, state_delays=(DelayFn("identity"),))
        u = apply_state_multiplier(m, 0, SpectralState(np.ones(3)))
        assert np.allclose(u.coeffs, [-1.0, -4.0, -9.0])

    def test_control_multiplier_and_bounds(self):
        m = _model(n=2, control_delays=(DelayFn("identity"),),
                   control_multipliers=([2.0, 3.0],))
        u = apply_control_multiplier(m, 0, SpectralState(np.array([1.0, 1.0])))
        assert np.allclose(u.coeffs, [2.0, 3.0])
        with pytest.raises(DomainError):
            apply_control_multiplier(m, 1, u)

    def test_multiplier_commutes_with_semigroup(self):
        m = _model(n=3, alpha=0.7, state_delays=(DelayFn("identity"),))
        u = SpectralState(np.array([0.2, -0.4, 0.6]))
        ab = apply_state_multiplier(m, 0, apply_T_alpha(m, 0.3, u))
        ba = apply_T_alpha(m, 0.3, apply_state_multiplier(m, 0, u))
        assert np.allclose(ab.coeffs, ba.coeffs, rtol=0.0, atol=1e-16)


class TestPhysicalSynthesis:
    def test_single_mode_peak_and_boundaries(self):
        u = SpectralState(np.array([1.0]))
        vals = synthesize_physical(u, [0.0, math.pi / 2.0, math.pi])
        assert vals[0] == pytest.approx(0.0, abs=1e-15)
        assert vals[1] == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-14)
        assert vals[2] == pytest.approx(0.0, abs=1e-13)

    def test_parseval(self):
        rng = np.random.default_rng(11)
        u = SpectralState(rng.standard_normal(16))
        x = np.linspace(0.0, math.pi, 20001)
        vals = synthesize_physical(u, x)
        l2 = np.sqrt(np.trapezoid(vals ** 2, x))
        assert l2 == pytest.approx(u.norm(), rel=1e-4)
