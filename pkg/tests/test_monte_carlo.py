import math

import numpy as np
import pytest

from nondissipative.exceptions import InvalidParameterError
from nondissipative.gamma_kernel import ScalingTimes, moments
from nondissipative.models.cavity import RabiQEDParams, jc_p_eg_averaged, jc_p_eg_ideal
from nondissipative.monte_carlo import (
    MCSettings,
    combined_z,
    mc_observable_average,
    mc_phase_average,
    mc_pulse_area_average,
    mc_pulse_area_observable,
)
from nondissipative.propagator import propagator_factor, pulse_area_evolve

MC = MCSettings(n_samples=200_000, seed=1234)


class TestSettings:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            MCSettings(n_samples=50)
        with pytest.raises(InvalidParameterError):
            MCSettings(batch_size=0)
        with pytest.raises(InvalidParameterError):
            MCSettings(seed=2**64)


class TestPhaseAverage:
    def test_zero_frequency_exact(self):
        est = mc_phase_average(0.0, 1.0, ScalingTimes.equal(0.1), MC)
        assert est.value == 1.0
        assert est.std_error == 0.0

    def test_cavity_example(self):
        s = ScalingTimes.equal(5e-7)
        est = mc_phase_average(3.1416e5, 4e-5, s, MCSettings(n_samples=10**6))
        exact = propagator_factor(3.1416e5, 4e-5, s)
        assert combined_z(est, exact) < 5
        assert abs(abs(est.value) - 0.377) < 5 * est.std_error + 5e-4

    def test_parity(self):
        s = ScalingTimes(0.3, 0.5)
        a = mc_phase_average(4.0, 2.0, s, MC)
        b = mc_phase_average(-4.0, 2.0, s, MC)
        # same seed and draws: the parity holds draw by draw
        assert a.value.real == pytest.approx(b.value.real, abs=1e-12)
        assert a.value.imag == pytest.approx(-b.value.imag, abs=1e-12)

    def test_batch_independence(self):
        s = ScalingTimes(0.3, 0.5)
        a = mc_phase_average(4.0, 2.0, s, MCSettings(20_000, seed=5, batch_size=7))
        b = mc_phase_average(4.0, 2.0, s, MCSettings(20_000, seed=5, batch_size=65_536))
        assert a == b

    def test_stderr_scaling(self):
        s = ScalingTimes(0.3, 0.5)
        ratios = []
        for seed in range(6):
            e1 = mc_phase_average(4.0, 2.0, s, MCSettings(50_000, seed=seed)).std_error
            e2 = mc_phase_average(4.0, 2.0, s, MCSettings(100_000, seed=seed)).std_error
            ratios.append(e2 / e1)
        assert np.mean(ratios) == pytest.approx(1 / math.sqrt(2), rel=0.15)


class TestObservable:
    def test_constant(self):
        est = mc_observable_average(lambda x: np.full_like(x, 0.25), 1.0, ScalingTimes.equal(0.1), MC)
        assert est.value == 0.25
        assert est.std_error == 0.0

    def test_rabi_average(self):
        p = RabiQEDParams(1.5708e5, 5e-7)
        t = 4e-5
        est = mc_observable_average(lambda x: jc_p_eg_ideal(p, x), t, ScalingTimes.equal(p.tau), MC)
        assert abs(est.value - float(jc_p_eg_averaged(p, t))) < 5 * est.std_error

    def test_linear(self):
        s = ScalingTimes(0.4, 0.8)
        est = mc_observable_average(lambda x: x, 3.0, s, MC)
        assert abs(est.value - moments(3.0, s)[0]) < 5 * est.std_error


class TestPulseArea:
    def test_zero(self):
        assert mc_pulse_area_average(0.0, 1e5, 1e-8, 1e-5, MC).value == 1.0

    def test_sideband_factor(self):
        rabi, tau, t = 5.906e5, 1.7e-8, 5e-5
        est = mc_pulse_area_average(2.0, rabi, tau, t, MCSettings(n_samples=10**6))
        rho = 0.5 * np.ones((2, 2), dtype=complex)
        factor = 2 * pulse_area_evolve(rho, [1.0, -1.0], rabi, tau, t)[0, 1]
        assert combined_z(est, factor) < 5

    def test_area_moments(self):
        rabi, tau, t = 3e5, 2e-8, 4e-5
        mean = mc_pulse_area_observable(lambda a: a, rabi, tau, t, MC)
        second = mc_pulse_area_observable(lambda a: a * a, rabi, tau, t, MC)
        assert abs(mean.value - rabi * t) < 5 * mean.std_error
        var = second.value - mean.value**2
        # std error of the variance from the group spread of the second moment
        assert abs(var - rabi**2 * t * tau) < 5 * second.std_error + 10 * mean.value * mean.std_error


def test_combined_z_edge_cases():
    from nondissipative.monte_carlo import MCEstimate

    assert combined_z(MCEstimate(1.0, 0.0, 100), 1.0) == 0.0
    assert combined_z(MCEstimate(1.0, 0.0, 100), 2.0) == math.inf
    assert combined_z(MCEstimate(1.0, 0.5, 100), 2.0) == 2.0
