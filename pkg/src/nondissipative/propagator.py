"""Averaged (non-unitary) evolution in the energy eigenbasis.

Averaging ``exp(-i L t')`` over the Gamma law of evolution times gives
``V(t) = (1 + i L tau1)^(-t/tau2)``. In the energy eigenbasis ``L`` is
diagonal with the Bohr frequencies ``omega_nm = levels[n] - levels[m]``, so
``V`` acts entrywise: every coherence decays at ``gamma(omega)`` and rotates at
``nu(omega)`` while populations are untouched.

Spectra are always given as angular frequencies (``E_n / hbar`` in rad/s).
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatchError, InvalidParameterError
from .gamma_kernel import ScalingTimes

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGEN_ATOL = 1e-10


def decay_rate(omega, s: ScalingTimes):
    """Coherence decay rate ``log(1 + omega^2 tau1^2) / (2 tau2)`` in 1/s."""
    x = np.asarray(omega, dtype=float) * s.tau1
    return np.log1p(x * x) / (2.0 * s.tau2)


def frequency_shift(omega, s: ScalingTimes):
    """Shifted oscillation frequency ``arctan(omega tau1) / tau2`` in rad/s."""
    x = np.asarray(omega, dtype=float) * s.tau1
    return np.arctan(x) / s.tau2


def propagator_factor(omega, t: float, s: ScalingTimes):
    """Principal-branch power ``(1 + i omega tau1)^(-t/tau2)``.

    Since ``Re(1 + i omega tau1) = 1 > 0`` the principal logarithm is
    ``log1p(x^2)/2 + i arctan(x)`` with no branch cut in reach; both parts are
    evaluated in that form to keep full relative accuracy for small ``x``.
    """
    if not t >= 0:
        raise InvalidParameterError(f"t must be >= 0, got {t!r}")
    gamma = decay_rate(omega, s)
    nu = frequency_shift(omega, s)
    return np.exp(-gamma * t) * np.exp(-1j * nu * t)


def bohr_frequencies(levels) -> np.ndarray:
    """Matrix ``omega[n, m] = levels[n] - levels[m]``."""
    levels = np.asarray(levels, dtype=float)
    if levels.ndim != 1 or levels.size < 1:
        raise InvalidParameterError("levels must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(levels)):
        raise InvalidParameterError("levels must be finite")
    return levels[:, None] - levels[None, :]


def _as_square(rho0, n_levels):
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim != 2 or rho0.shape[0] != rho0.shape[1]:
        raise DimensionMismatchError(f"density matrix must be square, got shape {rho0.shape}")
    if rho0.shape[0] != n_levels:
        raise DimensionMismatchError(
            f"density matrix is {rho0.shape[0]}x{rho0.shape[0]} but the spectrum has {n_levels} levels"
        )
    return rho0


def evolve(rho0, levels, t: float, s: ScalingTimes) -> np.ndarray:
    """Averaged density matrix at clock time ``t``.

    ``rho0`` must already be expressed in the eigenbasis of ``levels``.
    Diagonal entries are copied, not multiplied, so degenerate levels that
    differ only by rounding never pick up a spurious decay.
    """
    omega = bohr_frequencies(levels)
    rho0 = _as_square(rho0, omega.shape[0])
    factor = propagator_factor(omega, t, s)
    np.fill_diagonal(factor, 1.0)
    return factor * rho0


def pulse_area_evolve(rho0, levels_dimensionless, mean_rabi: float, tau: float, t: float) -> np.ndarray:
    """Averaged state when the pulse area, not the time, fluctuates.

    ``levels_dimensionless`` are eigenvalues of the Hamiltonian divided by
    ``hbar * mean_rabi``; each coherence is multiplied by
    ``(1 + i omega_tilde mean_rabi tau)^(-t/tau)``.
    """
    if not (np.isfinite(mean_rabi) and mean_rabi > 0):
        raise InvalidParameterError(f"mean_rabi must be > 0, got {mean_rabi!r}")
    levels = mean_rabi * np.asarray(levels_dimensionless, dtype=float)
    return evolve(rho0, levels, t, ScalingTimes.equal(tau))


def check_density_matrix(rho, *, herm_atol=HERMITIAN_ATOL, trace_atol=TRACE_ATOL, eig_atol=EIGEN_ATOL):
    """Raise :class:`InvalidParameterError` unless ``rho`` is a valid state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_atol:
        raise InvalidParameterError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_atol:
        raise InvalidParameterError(f"density matrix trace is {np.trace(rho).real!r}, not 1")
    if np.min(np.linalg.eigvalsh(rho)) < -eig_atol:
        raise InvalidParameterError("density matrix has a negative eigenvalue")
    return rho
