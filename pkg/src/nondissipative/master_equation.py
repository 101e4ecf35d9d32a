"""Phase-destroying master equations for a time-independent Hamiltonian.

Two equations are covered:

* the exact (generalized) one, ``drho/dt = -(1/tau) log(1 + i L tau) rho``,
  which is diagonal in the energy eigenbasis with rate
  :func:`generalized_rate`;
* its second-order truncation ``drho/dt = -i[H, rho] - (tau/2)[H, [H, rho]]``,
  solved both in closed form in the eigenbasis
  (:func:`solve_second_order_exact`) and by a fixed-step RK4 integrator in the
  original basis (:func:`integrate_second_order`). The closed form is the
  reference the integrator is checked against.

``H`` is always supplied in angular-frequency units (``H / hbar``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidParameterError, StepInstabilityError
from .propagator import HERMITIAN_ATOL, bohr_frequencies

MAX_STEPS = 10**8
BLOWUP = 1e6


def generalized_rate(omega, tau: float):
    """Eigenvalue of the exact generator for Bohr frequency ``omega``.

    ``-(1/tau) Log(1 + i omega tau)`` on the principal branch, returned as
    ``-(gamma + i nu)``.
    """
    if not (np.isfinite(tau) and tau > 0):
        raise InvalidParameterError(f"tau must be > 0, got {tau!r}")
    x = np.asarray(omega, dtype=float) * tau
    return -(0.5 * np.log1p(x * x) + 1j * np.arctan(x)) / tau


def second_order_rate(omega, tau: float):
    """Eigenvalue of the truncated generator: ``-i omega - omega^2 tau / 2``."""
    omega = np.asarray(omega, dtype=float)
    return -1j * omega - 0.5 * omega * omega * tau


class RateGap(NamedTuple):
    gamma_exact: float
    gamma_second_order: float
    relative_gap: float


def exact_vs_second_order_gap(omega: float, tau: float) -> RateGap:
    """Compare the exact decay rate with its second-order value ``omega^2 tau/2``.

    ``relative_gap = (gamma_2nd - gamma_exact) / gamma_2nd``; it grows
    monotonically with ``omega * tau`` and equals ``1 - ln 2`` at ``omega tau = 1``.
    """
    if not (np.isfinite(tau) and tau > 0):
        raise InvalidParameterError(f"tau must be > 0, got {tau!r}")
    x = float(omega) * tau
    gamma_exact = math.log1p(x * x) / (2.0 * tau)
    gamma_2nd = 0.5 * float(omega) ** 2 * tau
    if gamma_2nd == 0.0:
        return RateGap(gamma_exact, gamma_2nd, 0.0)
    # 1 - log1p(x^2)/x^2, kept accurate for small x
    x2 = x * x
    if x2 < 1e-4:
        gap = x2 / 2 - x2 * x2 / 3 + x2**3 / 4
    else:
        gap = 1.0 - math.log1p(x2) / x2
    return RateGap(gamma_exact, gamma_2nd, gap)


def check_hermitian(H) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidParameterError(f"H must be a square matrix, got shape {H.shape}")
    if np.max(np.abs(H - H.conj().T)) > HERMITIAN_ATOL * max(1.0, np.max(np.abs(H))):
        raise InvalidParameterError("H is not Hermitian")
    return H


def default_step(H, tau: float) -> float:
    """Step size ``0.01 / (||H|| max(1, ||H|| tau))`` for the explicit scheme."""
    norm = float(np.linalg.norm(np.asarray(H, dtype=complex), 2))
    if norm == 0.0:
        return math.inf
    return 0.01 / (norm * max(1.0, norm * tau))


@dataclass(frozen=True)
class IntegratorSettings:
    """Fixed-step RK4 settings.

    The step is shrunk so that an integer number of steps lands exactly on
    ``t_final``; ``store_every`` controls how many steps lie between stored
    samples.
    """

    dt: float
    t_final: float
    method_order: int = 4
    store_every: int = 1

    def __post_init__(self):
        if self.method_order != 4:
            raise InvalidParameterError("only the fourth-order scheme is available")
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise InvalidParameterError(f"dt must be > 0, got {self.dt!r}")
        if not (self.t_final >= self.dt):
            raise InvalidParameterError("dt must not exceed t_final")
        if self.t_final / self.dt > MAX_STEPS:
            raise InvalidParameterError(f"t_final/dt exceeds the {MAX_STEPS:.0e} step guard")
        if self.store_every < 1:
            raise InvalidParameterError("store_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_final / self.dt - 1e-9))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_samples, N, N)

    def coherence(self, i=0, j=1) -> np.ndarray:
        return self.states[:, i, j]

    def purity(self) -> np.ndarray:
        return np.einsum("kij,kji->k", self.states, self.states).real

    def trace(self) -> np.ndarray:
        return np.einsum("kii->k", self.states).real


def _second_order_rhs(H, tau):
    def rhs(rho):
        comm = H @ rho - rho @ H
        return -1j * comm - 0.5 * tau * (H @ comm - comm @ H)

    return rhs


def integrate_second_order(H, rho0, tau: float, settings: IntegratorSettings) -> Trajectory:
    """Integrate the second-order phase-destroying master equation with RK4.

    ``rho0`` can be in any basis. After every step the state is replaced by
    its Hermitian part to stop round-off drift.
    """
    H = check_hermitian(H)
    rho = np.array(rho0, dtype=complex)
    if rho.shape != H.shape:
        raise InvalidParameterError(f"rho0 shape {rho.shape} does not match H shape {H.shape}")
    if not tau >= 0:
        raise InvalidParameterError(f"tau must be >= 0, got {tau!r}")
    n_steps = settings.n_steps
    h = settings.t_final / n_steps
    f = _second_order_rhs(H, tau)

    times = [0.0]
    states = [rho.copy()]
    for step in range(1, n_steps + 1):
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if not np.all(np.abs(rho) < BLOWUP):
            raise StepInstabilityError(
                f"state diverged at step {step} (t={step * h:.3g}); reduce dt below "
                f"{default_step(H, tau):.3g}"
            )
        if step % settings.store_every == 0 or step == n_steps:
            times.append(step * h)
            states.append(rho.copy())
    return Trajectory(np.array(times), np.array(states))


def _eigenbasis_solve(H, rho0, t, rate_fn):
    H = check_hermitian(H)
    energies, vecs = np.linalg.eigh(H)
    rho_eb = vecs.conj().T @ np.asarray(rho0, dtype=complex) @ vecs
    rates = rate_fn(bohr_frequencies(energies))
    np.fill_diagonal(rates, 0.0)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([vecs @ (np.exp(rates * tk) * rho_eb) @ vecs.conj().T for tk in times])
    return out if np.ndim(t) else out[0]


def solve_second_order_exact(H, rho0, tau: float, t):
    """Closed-form solution of the second-order equation at time(s) ``t``.

    Each eigenbasis coherence evolves as ``exp((-i omega - omega^2 tau/2) t)``.
    """
    return _eigenbasis_solve(H, rho0, t, lambda w: second_order_rate(w, tau))


def solve_generalized(H, rho0, tau: float, t):
    """Closed-form solution of the generalized (all-orders) equation."""
    if tau == 0:
        return _eigenbasis_solve(H, rho0, t, lambda w: -1j * w)
    return _eigenbasis_solve(H, rho0, t, lambda w: generalized_rate(w, tau))
