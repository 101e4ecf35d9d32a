"""Ramsey fringes with a dispersively coupled cavity between the two pulses.

The fringe variable is the offset ``x = detuning - epsilon_n`` between the
classical-source detuning and the photon-number dependent light shift.
Averaging over a random time of flight multiplies the fringe by the
visibility ``(1 + x^2 tau^2)^(-T/2tau)`` and shifts its phase to
``arctan(x tau) / tau``.

Every function taking ``detuning`` accepts an array to sweep the fringe; when
omitted, ``p.detuning`` is used.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidParameterError, NormalizationError, RegimeWarning

GAUSSIAN_REGIME_LIMIT = 0.3


@dataclass(frozen=True)
class RamseyParams:
    """Parameters of one Ramsey sequence (angular frequencies, seconds).

    ``dispersive_shift`` is ``Omega_R^2 / delta``; ``waist_ratio`` is ``w / d``,
    the fraction of the flight time spent inside the cavity mode. Both
    pulses have area pi/2.
    """

    detuning: float
    dispersive_shift: float
    waist_ratio: float
    flight_time: float
    mean_photon: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.flight_time) and self.flight_time > 0):
            raise InvalidParameterError("flight_time must be > 0")
        if not (0 < self.waist_ratio <= 1):
            raise InvalidParameterError("waist_ratio must lie in (0, 1]")
        if not (np.isfinite(self.mean_photon) and self.mean_photon >= 0):
            raise InvalidParameterError("mean_photon must be >= 0")
        if not (np.isfinite(self.tau) and self.tau >= 0):
            raise InvalidParameterError("tau must be >= 0")
        if not np.isfinite(self.dispersive_shift):
            raise InvalidParameterError("dispersive_shift must be finite")


def ramsey_epsilon_n(p: RamseyParams, n=None):
    """Light shift ``(Omega_R^2/delta) (w/d) (2n + 1)``; ``n`` may be real (mean photon number)."""
    n = p.mean_photon if n is None else n
    return p.dispersive_shift * p.waist_ratio * (2.0 * np.asarray(n, dtype=float) + 1.0)


def fringe_offset(p: RamseyParams, detuning=None):
    detuning = p.detuning if detuning is None else np.asarray(detuning, dtype=float)
    return detuning - ramsey_epsilon_n(p)


def ramsey_p_eg_theory(p: RamseyParams, detuning=None):
    """Unaveraged fringe ``cos^2[(T/2)(detuning - epsilon_n)]``."""
    x = fringe_offset(p, detuning)
    return np.cos(0.5 * p.flight_time * x) ** 2


def ramsey_visibility(p: RamseyParams, detuning=None):
    """Fringe contrast ``(1 + x^2 tau^2)^(-T / 2 tau)``; 1 when ``tau == 0``."""
    x = fringe_offset(p, detuning)
    if p.tau == 0:
        return np.ones_like(x, dtype=float)
    xt = x * p.tau
    # divide the log by tau first: T / tau overflows for subnormal tau
    return np.exp(-0.5 * p.flight_time * (np.log1p(xt * xt) / p.tau))


def ramsey_shifted_offset(p: RamseyParams, detuning=None):
    """Phase-shifted fringe frequency ``arctan(x tau) / tau``."""
    x = fringe_offset(p, detuning)
    if p.tau == 0:
        return x
    return np.arctan(x * p.tau) / p.tau


def ramsey_p_eg_averaged(p: RamseyParams, detuning=None):
    """Flight-time averaged fringe ``(1 + F cos[x' T]) / 2``."""
    vis = ramsey_visibility(p, detuning)
    return 0.5 * (1.0 + vis * np.cos(ramsey_shifted_offset(p, detuning) * p.flight_time))


def ramsey_width(p: RamseyParams) -> float:
    """Width ``(T tau)^(-1/2)`` (rad/s) of the Gaussian fringe envelope."""
    if p.tau <= 0:
        raise InvalidParameterError("the Gaussian width needs tau > 0")
    return 1.0 / math.sqrt(p.flight_time * p.tau)


def ramsey_p_eg_gaussian(p: RamseyParams, detuning=None):
    """Small-``x tau`` fringe ``(1 + exp(-x^2 T tau / 2) cos(x T)) / 2``.

    Warns with :class:`RegimeWarning` if any ``|x| tau`` exceeds 0.3.
    """
    x = fringe_offset(p, detuning)
    if np.any(np.abs(x) * p.tau > GAUSSIAN_REGIME_LIMIT):
        warnings.warn(
            "Gaussian fringe envelope used with |detuning - epsilon_n| tau > 0.3",
            RegimeWarning,
            stacklevel=2,
        )
    envelope = np.exp(-0.5 * x * x * p.flight_time * p.tau)
    return 0.5 * (1.0 + envelope * np.cos(x * p.flight_time))


def _half_pi_pulse():
    # |e> -> (|e> + |g>)/sqrt2, |g> -> (|g> - |e>)/sqrt2; basis order (e, g)
    return np.array([[1.0, -1.0], [1.0, 1.0]]) / math.sqrt(2.0)


def ramsey_statevector_sequence(coeffs, p: RamseyParams, t_int: float | None = None, detuning=None) -> float:
    """Probability of ``g`` after pulse / dispersive flight / pulse, from the joint state.

    ``coeffs[n]`` is the amplitude of the cavity Fock state ``|n>``. The atom
    starts in ``e``. The atomic phase from the detuning accrues over the whole
    flight time ``T``; the dispersive phases only during ``t_int``
    (default ``T * waist_ratio``).
    """
    c = np.asarray(coeffs, dtype=complex)
    norm = float(np.sum(np.abs(c) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"sum |c_n|^2 = {norm!r}, expected 1")
    detuning = p.detuning if detuning is None else float(detuning)
    t_int = p.flight_time * p.waist_ratio if t_int is None else t_int
    T = p.flight_time
    chi = p.dispersive_shift
    n = np.arange(c.size)

    pulse = _half_pi_pulse()
    psi = np.zeros((c.size, 2), dtype=complex)
    psi[:, 0] = c
    psi = psi @ pulse.T
    phase_e = np.exp(-0.5j * detuning * T + 1j * chi * (n + 1) * t_int)
    phase_g = np.exp(0.5j * detuning * T - 1j * chi * n * t_int)
    psi = psi * np.stack([phase_e, phase_g], axis=1)
    psi = psi @ pulse.T
    return float(np.sum(np.abs(psi[:, 1]) ** 2))
