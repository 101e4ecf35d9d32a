"""Blue-sideband Rabi oscillations of a trapped ion.

Only the consequence of the sideband Hamiltonian that matters here is used:
the Fock-state dependent Rabi frequency
``Omega_n = Omega exp(-eta^2/2) eta L_n^1(eta^2) / sqrt(n+1)``. Decoherence
comes from a fluctuating pulse area, which in the small-``tau`` limit damps
each oscillation at ``gamma_n = 2 Omega_n^2 tau``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..exceptions import InvalidParameterError, OrderRangeError, RegimeWarning
from ..gamma_kernel import ScalingTimes
from ..propagator import decay_rate, frequency_shift

LAGUERRE_MAX_ORDER = 64
REFERENCE_FREQ_EXPONENT = 0.35


def laguerre_gen1(n: int, x):
    """Generalized Laguerre polynomial ``L_n^1(x)`` by forward recurrence.

    ``k L_k = (2k - x) L_{k-1} - k L_{k-2}`` (the alpha = 1 case). Validated
    for ``n <= 64`` and ``0 <= x < 1``.
    """
    if int(n) != n or n < 0:
        raise InvalidParameterError(f"order must be a non-negative integer, got {n!r}")
    if n > LAGUERRE_MAX_ORDER:
        raise OrderRangeError(f"order {n} exceeds the validated maximum {LAGUERRE_MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 - x
    for k in range(2, int(n) + 1):
        prev, cur = cur, ((2 * k - x) * cur - k * prev) / k
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class IonParams:
    """Sideband drive: base Rabi frequency (rad/s), Lamb-Dicke parameter, tau (s), Fock state."""

    base_rabi: float
    eta: float
    tau: float = 0.0
    fock_n: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.base_rabi) and self.base_rabi > 0):
            raise InvalidParameterError("base_rabi must be > 0")
        if not (np.isfinite(self.eta) and self.eta > 0):
            raise InvalidParameterError("eta must be > 0")
        if not (np.isfinite(self.tau) and self.tau >= 0):
            raise InvalidParameterError("tau must be >= 0")
        if int(self.fock_n) != self.fock_n or self.fock_n < 0:
            raise InvalidParameterError("fock_n must be a non-negative integer")
        if self.fock_n > LAGUERRE_MAX_ORDER:
            raise OrderRangeError(f"fock_n must be <= {LAGUERRE_MAX_ORDER}")
        if self.eta >= 1:
            warnings.warn(f"eta = {self.eta} is outside the studied regime eta < 1", RegimeWarning, stacklevel=3)


def rabi_frequency_for(base_rabi: float, eta: float, n: int) -> float:
    return base_rabi * math.exp(-eta * eta / 2) * eta * laguerre_gen1(n, eta * eta) / math.sqrt(n + 1)


def ion_rabi_frequency(p: IonParams) -> float:
    """Blue-sideband Rabi frequency for the ion's Fock state ``p.fock_n``."""
    return rabi_frequency_for(p.base_rabi, p.eta, p.fock_n)


def ion_decay_rate(p: IonParams, exact: bool = False) -> float:
    """``2 Omega_n^2 tau``, or with ``exact=True`` the all-orders ``log`` form."""
    omega_n = ion_rabi_frequency(p)
    if p.tau == 0:
        return 0.0
    if exact:
        return float(decay_rate(2.0 * omega_n, ScalingTimes.equal(p.tau)))
    return 2.0 * omega_n**2 * p.tau


def ion_p_down(p: IonParams, t, exact: bool = False):
    """Averaged ``P_down(n, t) = (1 + exp(-gamma_n t) cos(2 Omega_n t)) / 2``.

    With ``exact=True`` the decay rate and the shifted frequency are the
    all-orders ones instead of the small-``tau`` values.
    """
    t = np.asarray(t, dtype=float)
    omega_n = ion_rabi_frequency(p)
    gamma = ion_decay_rate(p, exact=exact)
    freq = 2.0 * omega_n
    if exact and p.tau > 0:
        freq = float(frequency_shift(freq, ScalingTimes.equal(p.tau)))
    return 0.5 * (1.0 + np.exp(-gamma * t) * np.cos(freq * t))


def ion_p_down_ideal(p: IonParams, t):
    t = np.asarray(t, dtype=float)
    return 0.5 * (1.0 + np.cos(2.0 * ion_rabi_frequency(p) * t))


def ion_estimate_tau(gamma0: float, omega0: float) -> float:
    """Match the n = 0 decay rate: ``tau = gamma0 / (2 Omega_0^2)``."""
    if not (np.isfinite(gamma0) and gamma0 > 0):
        raise InvalidParameterError(f"gamma0 must be > 0, got {gamma0!r}")
    if not (np.isfinite(omega0) and omega0 > 0):
        raise InvalidParameterError(f"omega0 must be > 0, got {omega0!r}")
    return gamma0 / (2.0 * omega0**2)


def rabi_ratios(eta: float, n_max: int) -> np.ndarray:
    """``Omega_n / Omega_0`` for ``n = 0 .. n_max``."""
    n = np.arange(int(n_max) + 1)
    x = eta * eta
    lag = np.array([laguerre_gen1(k, x) for k in n])
    return lag / np.sqrt(n + 1.0)


class PowerLawSummary(NamedTuple):
    freq_exponent: float
    decay_exponent: float
    max_residual: float  # fitted power law, free prefactor
    anchored_residual: float  # fitted exponent, prefactor pinned to Omega_0
    reference_exponent_residual: float  # (n+1)^0.35 pinned to Omega_0


def ion_power_law_exponents(eta: float, n_max: int = 16) -> PowerLawSummary:
    """Least-squares power law ``Omega_n ~ (n+1)^p`` over ``n = 0 .. n_max``.

    The decay exponent is ``2 p`` because ``gamma_n`` is proportional to
    ``Omega_n^2``. Residuals are maximum relative deviations ``|model/data - 1|``.
    """
    if n_max < 4:
        raise InvalidParameterError("n_max must be >= 4")
    ratios = rabi_ratios(eta, n_max)
    if np.any(ratios <= 0):
        raise InvalidParameterError("Rabi frequencies change sign; no power law exists")
    x = np.log(np.arange(n_max + 1) + 1.0)
    y = np.log(ratios)
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    intercept = float(y.mean() - slope * x.mean())

    def worst(model):
        return float(np.max(np.abs(model / ratios - 1.0)))

    return PowerLawSummary(
        freq_exponent=slope,
        decay_exponent=2.0 * slope,
        max_residual=worst(np.exp(intercept + slope * x)),
        anchored_residual=worst(np.exp(slope * x)),
        reference_exponent_residual=worst(np.exp(REFERENCE_FREQ_EXPONENT * x)),
    )
