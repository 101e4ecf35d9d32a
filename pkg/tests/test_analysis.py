import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nondissipative.analysis import (
    JC_RABI,
    add_noise,
    fit_damped_cosine,
    fit_power_law,
    roundtrip_tau,
    synthetic_series,
)
from nondissipative.exceptions import FitError, InvalidParameterError
from nondissipative.models import cavity, ion

JC_GAMMA = 24374.52395942304419  # mpmath
JC_NU_EXACT = 311612.9999390835012  # mpmath, arctan(2 Omega_R tau) / tau


def jc_params():
    return cavity.RabiQEDParams(JC_RABI, 0.5e-6)


class TestDampedCosine:
    def test_exact_averaged_signal(self):
        t, y, _ = synthetic_series("jc", 0.5e-6)
        fit = fit_damped_cosine(t, y)
        assert fit.gamma == pytest.approx(JC_GAMMA, rel=5e-3)
        # the averaged signal oscillates at the shifted frequency, not at 2 Omega_R
        assert fit.nu == pytest.approx(JC_NU_EXACT, rel=1e-3)
        assert fit.offset == pytest.approx(0.5, abs=1e-9)
        assert fit.amplitude == pytest.approx(-0.5, abs=1e-9)

    def test_unshifted_form_recovers_rabi(self):
        t = np.linspace(0, 200e-6, 200)
        y = 0.5 * (1 - np.exp(-JC_GAMMA * t) * np.cos(2 * JC_RABI * t))
        fit = fit_damped_cosine(t, y)
        assert fit.gamma == pytest.approx(JC_GAMMA, rel=5e-3)
        assert fit.nu == pytest.approx(2 * JC_RABI, rel=1e-3)

    def test_undamped(self):
        t = np.linspace(0, 10, 300)
        fit = fit_damped_cosine(t, 0.3 + 0.2 * np.cos(4.0 * t))
        assert fit.gamma <= 1e-6 * fit.nu
        assert fit.nu == pytest.approx(4.0, rel=1e-9)

    def test_constant_series_fails(self):
        with pytest.raises(FitError):
            fit_damped_cosine(np.linspace(0, 1, 50), np.full(50, 0.4))

    def test_bad_fit_reported(self):
        rng = np.random.default_rng(0)
        t = np.linspace(0, 1, 200)
        with pytest.raises(FitError):
            fit_damped_cosine(t, rng.uniform(size=t.size))

    def test_input_validation(self):
        with pytest.raises(InvalidParameterError):
            fit_damped_cosine(np.arange(5.0), np.arange(5.0))
        with pytest.raises(InvalidParameterError):
            fit_damped_cosine(np.arange(10.0)[::-1], np.arange(10.0))
        with pytest.raises(InvalidParameterError):
            fit_damped_cosine(np.arange(10.0), np.r_[np.arange(9.0), np.nan])

    def test_not_an_alias(self):
        t, y, _ = synthetic_series("jc", 0.5e-6)
        fit = fit_damped_cosine(t, y)
        assert fit.runner_up_ssr > 100 * fit.grid_ssr

    def test_estimator_consistency(self):
        # noiseless data are fitted to the optimizer floor, so the ratio is
        # checked with an absolute floor of 1e-9
        p = jc_params()
        gamma, nu = cavity.jc_rates(p)
        prev = None
        for n in (50, 100, 200, 400):
            t = np.linspace(0, 200e-6, n)
            fit = fit_damped_cosine(t, cavity.jc_p_eg_averaged(p, t))
            err = max(abs(fit.gamma - gamma) / gamma, abs(fit.nu - nu) / nu)
            if prev is not None:
                assert err <= max(0.6 * prev, 1e-9)
            prev = err

    def test_noise_robustness(self):
        t, y, _ = synthetic_series("jc", 0.5e-6)
        for seed in range(5):
            fit = fit_damped_cosine(t, add_noise(y, 0.01, seed))
            assert fit.gamma == pytest.approx(JC_GAMMA, rel=0.10)

    def test_callable(self):
        t = np.linspace(0, 10, 100)
        y = 1 + np.exp(-0.1 * t) * np.cos(2 * t)
        fit = fit_damped_cosine(t, y)
        np.testing.assert_allclose(fit(t), y, atol=1e-9)

    def test_noise_deterministic(self):
        y = np.zeros(10)
        np.testing.assert_array_equal(add_noise(y, 0.1, 3), add_noise(y, 0.1, 3))


class TestPowerLaw:
    def test_exact(self):
        n = np.arange(10)
        fit = fit_power_law(n, 3.0 * (n + 1.0) ** 0.7)
        assert fit.exponent == pytest.approx(0.7, abs=1e-12)
        assert fit.prefactor == pytest.approx(3.0, rel=1e-12)
        assert fit.max_rel_residual < 1e-12

    def test_ion_decay(self):
        n = np.arange(17)
        omega0 = 2 * math.pi * 94e3
        gamma = 2 * (omega0 * ion.rabi_ratios(0.202, 16)) ** 2 * 1.7e-8
        assert fit_power_law(n, gamma).exponent == pytest.approx(0.70, abs=0.05)

    def test_lamb_dicke(self):
        n = np.arange(17)
        assert fit_power_law(n, 5.0 * np.sqrt(n + 1.0)).exponent == pytest.approx(0.5, abs=1e-10)

    def test_invalid(self):
        with pytest.raises(InvalidParameterError):
            fit_power_law([0, 1, 2], [1.0, -1.0, 2.0])
        with pytest.raises(InvalidParameterError):
            fit_power_law([0, 1], [1.0, 2.0])


class TestRoundTrip:
    def test_jc(self):
        assert roundtrip_tau("jc", 0.5e-6).relative_error < 0.02

    def test_zero_tau(self):
        r = roundtrip_tau("jc", 0.0)
        assert r.estimated_tau < 1e-15

    @pytest.mark.parametrize("n", [0, 1, 3])
    def test_ion(self, n):
        assert roundtrip_tau("ion", 1.7e-8, fock_n=n).relative_error < 0.02

    def test_unknown_model(self):
        with pytest.raises(InvalidParameterError):
            roundtrip_tau("maser", 1e-6)


@settings(max_examples=50, deadline=None)
@given(scale=st.floats(1e-6, 1e6), exponent=st.floats(-1.0, 2.0), seed=st.integers(0, 1000))
def test_power_law_scale_invariance(scale, exponent, seed):
    rng = np.random.default_rng(seed)
    n = np.arange(12)
    values = (n + 1.0) ** exponent * rng.uniform(0.8, 1.2, n.size)
    a = fit_power_law(n, values)
    b = fit_power_law(n, scale * values)
    assert abs(a.exponent - b.exponent) <= 1e-14 * max(1.0, abs(a.exponent)) + 1e-14
