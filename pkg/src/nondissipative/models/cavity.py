"""Vacuum Rabi oscillations of an atom in a resonant cavity.

The vacuum sector {|e,0>, |g,1>} is an exact two-level system split by
``2 * rabi_frequency``, so averaging over the interaction time gives a single
damped cosine with the rates of that Bohr frequency.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidParameterError, RegimeWarning
from ..gamma_kernel import ScalingTimes
from ..propagator import decay_rate, frequency_shift


@dataclass(frozen=True)
class RabiQEDParams:
    rabi_frequency: float  # Omega_R, rad/s
    tau: float = 0.0  # s

    def __post_init__(self):
        if not (np.isfinite(self.rabi_frequency) and self.rabi_frequency > 0):
            raise InvalidParameterError("rabi_frequency must be > 0")
        if not (np.isfinite(self.tau) and self.tau >= 0):
            raise InvalidParameterError("tau must be >= 0")


def jc_rates(p: RabiQEDParams) -> tuple[float, float]:
    """Decay rate and oscillation frequency of the averaged vacuum Rabi signal."""
    omega = 2.0 * p.rabi_frequency
    if p.tau == 0:
        return 0.0, omega
    s = ScalingTimes.equal(p.tau)
    return float(decay_rate(omega, s)), float(frequency_shift(omega, s))


def jc_gamma_small_tau(p: RabiQEDParams) -> float:
    """Leading-order decay rate ``2 Omega_R^2 tau``."""
    return 2.0 * p.rabi_frequency**2 * p.tau


def jc_p_eg_ideal(p: RabiQEDParams, t):
    """Probability of finding the atom in ``g``: ``(1 - cos 2 Omega_R t) / 2``."""
    t = np.asarray(t, dtype=float)
    return 0.5 * (1.0 - np.cos(2.0 * p.rabi_frequency * t))


def jc_p_eg_averaged(p: RabiQEDParams, t):
    """Interaction-time averaged probability ``(1 - exp(-gamma t) cos(nu t)) / 2``."""
    gamma, nu = jc_rates(p)
    t = np.asarray(t, dtype=float)
    return 0.5 * (1.0 - np.exp(-gamma * t) * np.cos(nu * t))


def jc_estimate_tau(gamma: float, rabi: float) -> float:
    """Invert ``gamma = 2 Omega_R^2 tau``.

    Warns with :class:`RegimeWarning` when the result violates
    ``Omega_R tau < 0.25``, where the small-tau formula no longer holds.
    """
    if not (np.isfinite(gamma) and gamma > 0):
        raise InvalidParameterError(f"gamma must be > 0, got {gamma!r}")
    if not (np.isfinite(rabi) and rabi > 0):
        raise InvalidParameterError(f"rabi must be > 0, got {rabi!r}")
    tau = gamma / (2.0 * rabi**2)
    if rabi * tau >= 0.25:
        warnings.warn(
            f"Omega_R*tau = {rabi * tau:.3g} is not small; the estimate is unreliable",
            RegimeWarning,
            stacklevel=2,
        )
    return tau
