"""Averaged unitary evolution over random evolution times.

The clock time ``t`` maps to a random evolution time distributed as a gamma
law with shape ``t / tau2`` and scale ``tau1``. Averaging the unitary
propagator over that law gives an exponential decay of the coherences in
the energy eigenbasis with no energy exchange with an environment.
"""

__version__ = "0.1.0"

from .gamma_kernel import (
    DEFAULT_SEED,
    PulseAreaDistribution,
    ScalingTimes,
    WaitingTimeDistribution,
    cdf,
    density,
    moments,
    sample,
    time_average,
)
from .master_equation import (
    IntegratorSettings,
    exact_vs_second_order_gap,
    integrate_second_order,
    solve_generalized,
    solve_second_order_exact,
)
from .monte_carlo import MCSettings, mc_phase_average, mc_pulse_area_average
from .propagator import decay_rate, evolve, frequency_shift, propagator_factor, pulse_area_evolve

__all__ = [
    "DEFAULT_SEED",
    "IntegratorSettings",
    "MCSettings",
    "PulseAreaDistribution",
    "ScalingTimes",
    "WaitingTimeDistribution",
    "__version__",
    "cdf",
    "decay_rate",
    "density",
    "evolve",
    "exact_vs_second_order_gap",
    "frequency_shift",
    "integrate_second_order",
    "mc_phase_average",
    "mc_pulse_area_average",
    "moments",
    "propagator_factor",
    "pulse_area_evolve",
    "sample",
    "solve_generalized",
    "solve_second_order_exact",
    "time_average",
]
