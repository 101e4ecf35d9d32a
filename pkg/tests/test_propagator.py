import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nondissipative.exceptions import DimensionMismatchError, InvalidParameterError
from nondissipative.gamma_kernel import ScalingTimes
from nondissipative.propagator import (
    bohr_frequencies,
    check_density_matrix,
    decay_rate,
    evolve,
    frequency_shift,
    propagator_factor,
    pulse_area_evolve,
)

# mpmath, 40 digits
JC_GAMMA = 24374.52395942304419
JC_GAMMA_SMALL = 24674.01100272339655
SHIFT_EXAMPLE = 311613.7168900078154
MODULUS_EXAMPLE = 0.3771978368038587305
FACTORS = [
    ((1e5, 5e-6, 1e-6), complex(0.8567948516898772699, -0.4662277015841830116)),
    ((3.0, 0.7, 0.2), complex(-0.1840344166991399254, -0.5540947460117212804)),
    ((-40.0, 1.3, 0.05), complex(-7.14338479500164629e-10, -4.01010195263651529e-10)),
    ((1.0, 0.3, 1.0), complex(0.8763488405872622215, -0.2103927421694883354)),
]


def random_density_matrix(rng, n, rank=None):
    """Random state of the given rank (random rank when None); rank 1 is pure."""
    rank = int(rng.integers(1, n + 1)) if rank is None else rank
    b = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = b @ b.conj().T
    return rho / np.trace(rho).real


class TestRates:
    def test_zero_frequency(self):
        s = ScalingTimes.equal(1e-6)
        assert decay_rate(0.0, s) == 0.0
        assert frequency_shift(0.0, s) == 0.0

    def test_cavity_decay(self):
        s = ScalingTimes.equal(0.5e-6)
        omega = 2 * (2 * math.pi * 25e3)
        assert decay_rate(omega, s) == pytest.approx(JC_GAMMA, rel=1e-13)
        small = 0.5 * omega**2 * 0.5e-6
        assert small == pytest.approx(JC_GAMMA_SMALL, rel=1e-13)
        assert abs(small - JC_GAMMA) / JC_GAMMA < 0.015

    def test_shift_value(self):
        assert frequency_shift(3.1416e5, ScalingTimes.equal(5e-7)) == pytest.approx(SHIFT_EXAMPLE, rel=1e-13)

    @pytest.mark.parametrize("x", [1e-4, 1e-3, 1e-2, 0.1])
    def test_shift_taylor_bound(self, x):
        omega, tau = 1e6, x / 1e6
        nu = frequency_shift(omega, ScalingTimes.equal(tau))
        assert abs(nu - omega) / omega < x * x / 3

    def test_symmetry(self):
        s = ScalingTimes(0.3, 0.9)
        w = np.linspace(-50, 50, 101)
        np.testing.assert_array_equal(decay_rate(w, s), decay_rate(-w, s))
        np.testing.assert_array_equal(frequency_shift(w, s), -frequency_shift(-w, s))

    def test_monotone_and_bounded(self):
        s = ScalingTimes(0.3, 0.9)
        w = np.linspace(0, 1e6, 1001)
        assert np.all(np.diff(decay_rate(w, s)) >= 0)
        assert np.all(np.abs(frequency_shift(w, s)) <= math.pi / (2 * s.tau2))

    def test_contraction(self):
        w = np.linspace(-1e3, 1e3, 201)
        nu = frequency_shift(w, ScalingTimes.equal(0.01))
        assert np.all(np.abs(nu) <= np.abs(w))
        assert np.all(np.sign(nu) == np.sign(w))


class TestFactor:
    def test_identity_at_zero(self):
        assert propagator_factor(123.0, 0.0, ScalingTimes.equal(0.1)) == 1.0

    def test_unitary_limit(self):
        val = propagator_factor(1e5, 1e-5, ScalingTimes.equal(1e-12))
        assert abs(val - np.exp(-1j)) < 1e-6

    def test_modulus_example(self):
        val = propagator_factor(3.1416e5, 4e-5, ScalingTimes.equal(5e-7))
        assert abs(val) == pytest.approx(MODULUS_EXAMPLE, rel=1e-13)

    @pytest.mark.parametrize("args,expected", FACTORS)
    def test_against_mpmath(self, args, expected):
        omega, t, tau = args
        val = propagator_factor(omega, t, ScalingTimes.equal(tau))
        assert abs(val - expected) <= 1e-13 * max(abs(expected), 1e-300) + 1e-22

    def test_negative_time(self):
        with pytest.raises(InvalidParameterError):
            propagator_factor(1.0, -1.0, ScalingTimes.equal(1.0))

    def test_modulus_below_one(self):
        s = ScalingTimes(0.4, 0.6)
        w = np.linspace(-30, 30, 61)
        w = w[w != 0]
        assert np.all(np.abs(propagator_factor(w, 2.0, s)) < 1.0)
        assert abs(propagator_factor(0.0, 2.0, s)) == 1.0


class TestEvolve:
    def test_diagonal_state_frozen(self):
        rho = np.diag([0.2, 0.5, 0.3]).astype(complex)
        out = evolve(rho, [0.0, 1.0, 5.0], 7.0, ScalingTimes.equal(0.4))
        np.testing.assert_array_equal(out, rho)

    def test_qubit_coherence(self):
        omega, tau = 3.0, 0.2
        rho = 0.5 * np.ones((2, 2), dtype=complex)
        for t in (0.5, 1.0, 4.0):
            out = evolve(rho, [0.0, omega], t, ScalingTimes.equal(tau))
            assert abs(out[0, 1]) == pytest.approx(0.5 * (1 + omega**2 * tau**2) ** (-t / (2 * tau)), rel=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            evolve(np.eye(2) / 2, [0.0, 1.0, 2.0], 1.0, ScalingTimes.equal(1.0))
        with pytest.raises(DimensionMismatchError):
            evolve(np.ones(3), [0.0, 1.0, 2.0], 1.0, ScalingTimes.equal(1.0))

    def test_degenerate_levels_do_not_decay(self):
        rho = 0.5 * np.ones((2, 2), dtype=complex)
        out = evolve(rho, [1.0, 1.0], 5.0, ScalingTimes.equal(0.5))
        np.testing.assert_array_equal(out, rho)

    def test_positivity_on_random_states(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            n = int(rng.integers(2, 7))
            rho = random_density_matrix(rng, n)
            levels = rng.uniform(-10, 10, n)
            t, tau = rng.uniform(0, 5), rng.uniform(1e-3, 2)
            out = evolve(rho, levels, t, ScalingTimes.equal(tau))
            np.testing.assert_array_equal(np.diag(out), np.diag(rho))
            assert np.max(np.abs(out - out.conj().T)) <= 1e-15
            assert abs(np.trace(out) - np.trace(rho)) <= 1e-15
            assert np.min(np.linalg.eigvalsh(out)) >= -1e-10
            check_density_matrix(out)

    def test_semigroup_example(self):
        rng = np.random.default_rng(5)
        rho = random_density_matrix(rng, 4)
        levels = [0.0, 1.3, -2.0, 4.4]
        s = ScalingTimes(0.3, 0.8)
        two_step = evolve(evolve(rho, levels, 1.1, s), levels, 2.3, s)
        np.testing.assert_allclose(two_step, evolve(rho, levels, 3.4, s), atol=1e-12, rtol=0)


class TestPulseArea:
    def test_zero_entries_unchanged(self):
        rho = 0.5 * np.ones((2, 2), dtype=complex)
        out = pulse_area_evolve(rho, [0.0, 0.0], 1e5, 1e-8, 1e-4)
        np.testing.assert_array_equal(out, rho)

    def test_reduces_to_evolve(self):
        rng = np.random.default_rng(1)
        rho = random_density_matrix(rng, 3)
        lev = np.array([0.0, 0.7, -1.2])
        rabi, tau, t = 4e4, 2e-6, 3e-5
        np.testing.assert_allclose(
            pulse_area_evolve(rho, lev, rabi, tau, t), evolve(rho, rabi * lev, t, ScalingTimes.equal(tau)), rtol=1e-15
        )

    def test_sideband_pair(self):
        rabi, tau, t = 5.906e5, 1.7e-8, 5e-5
        rho = 0.5 * np.ones((2, 2), dtype=complex)
        out = pulse_area_evolve(rho, [1.0, -1.0], rabi, tau, t)
        gamma = math.log1p(4 * rabi**2 * tau**2) / (2 * tau)
        assert abs(out[0, 1]) == pytest.approx(0.5 * math.exp(-gamma * t), rel=1e-12)


class TestCheckDensity:
    def test_rejects_bad_states(self):
        with pytest.raises(InvalidParameterError):
            check_density_matrix(np.array([[0.5, 1.0], [0.0, 0.5]]))
        with pytest.raises(InvalidParameterError):
            check_density_matrix(np.eye(2))
        with pytest.raises(InvalidParameterError):
            check_density_matrix(np.array([[1.5, 0], [0, -0.5]]))

    def test_bohr_antisymmetric(self):
        w = bohr_frequencies([0.0, 2.0, 5.0])
        np.testing.assert_array_equal(w, -w.T)


@settings(max_examples=60, deadline=None)
@given(
    omega=st.floats(-1e3, 1e3),
    t=st.floats(0.0, 50.0),
    tau1=st.floats(1e-4, 1.0),
    tau2=st.floats(1e-3, 1.0),
)
def test_consistency_triangle(omega, t, tau1, tau2):
    s = ScalingTimes(tau1, tau2)
    f = propagator_factor(omega, t, s)
    gamma, nu = decay_rate(omega, s), frequency_shift(omega, s)
    assert abs(abs(f) - math.exp(-gamma * t)) <= 1e-12
    if abs(f) > 1e-200:
        phase_err = np.angle(f * np.exp(1j * nu * t))
        assert abs(phase_err) <= 1e-12 * max(1.0, abs(nu * t))


@settings(max_examples=60, deadline=None)
@given(
    t1=st.floats(0.0, 10.0),
    t2=st.floats(0.0, 10.0),
    tau=st.floats(1e-3, 2.0),
    seed=st.integers(0, 2**32 - 1),
)
def test_semigroup_property(t1, t2, tau, seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(rng, 3)
    levels = rng.uniform(-5, 5, 3)
    s = ScalingTimes.equal(tau)
    lhs = evolve(evolve(rho, levels, t1, s), levels, t2, s)
    rhs = evolve(rho, levels, t1 + t2, s)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(omega=st.floats(-100.0, 100.0), t=st.floats(0.0, 5.0))
def test_unitary_limit_first_order(omega, t):
    tau = 1e-9
    f = propagator_factor(omega, t, ScalingTimes.equal(tau))
    # leading corrections: decay omega^2 tau t / 2 and phase omega^3 tau^2 t / 3
    bound = 0.5 * omega**2 * tau * t + abs(omega) ** 3 * tau**2 * t + 1e-12
    assert abs(f - np.exp(-1j * omega * t)) <= bound
