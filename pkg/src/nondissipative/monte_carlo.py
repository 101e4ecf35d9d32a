"""Monte Carlo estimates of time- and pulse-area averages.

This is the stochastic counterpart of the closed forms in
:mod:`nondissipative.propagator`: draw the random evolution time (or pulse
area), evaluate the exact unitary quantity for each draw, and average.

The samples are split into ``N_GROUPS`` statistical groups. Group ``g`` draws
from its own stream seeded with ``(seed, g)``, so the result does not depend on
how the draws are chunked (``batch_size``), and the spread of the group means
gives the standard error. Groups are independent and could be evaluated in
any order; merging is a weighted sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import InvalidParameterError
from .gamma_kernel import DEFAULT_SEED, PulseAreaDistribution, ScalingTimes, WaitingTimeDistribution

N_GROUPS = 100


@dataclass(frozen=True)
class MCSettings:
    n_samples: int = 100_000
    seed: int = DEFAULT_SEED
    batch_size: int = 65_536

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < N_GROUPS:
            raise InvalidParameterError(f"n_samples must be an integer >= {N_GROUPS}")
        if int(self.batch_size) != self.batch_size or self.batch_size < 1:
            raise InvalidParameterError("batch_size must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParameterError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class MCEstimate:
    value: complex | float
    std_error: float
    n_samples: int


def _group_sizes(n):
    base, extra = divmod(n, N_GROUPS)
    return [base + (1 if g < extra else 0) for g in range(N_GROUPS)]


def _estimate(draw_fn, func, mc: MCSettings) -> MCEstimate:
    """Group-means estimate of E[func(X)]; ``draw_fn(rng, size)`` samples X."""
    sizes = _group_sizes(int(mc.n_samples))
    means = []
    for g, size in enumerate(sizes):
        rng = np.random.default_rng(np.random.SeedSequence([int(mc.seed), g]))
        chunks = []
        left = size
        while left:
            chunk = min(left, int(mc.batch_size))
            chunks.append(draw_fn(rng, chunk))
            left -= chunk
        # reduce over the whole group at once so the summation order, and
        # hence the last bit, does not depend on batch_size
        x = np.concatenate(chunks)
        vals = np.broadcast_to(np.asarray(func(x)), x.shape)
        means.append(vals.sum() / size)
    means = np.asarray(means)
    weights = np.asarray(sizes, dtype=float)
    value = np.sum(weights * means) / mc.n_samples
    if np.all(means == means[0]):
        value, err = means[0], 0.0
    else:
        err = float(np.std(means, ddof=1) / np.sqrt(N_GROUPS))
        if np.iscomplexobj(means):
            err = float(np.sqrt(np.var(means.real, ddof=1) + np.var(means.imag, ddof=1)) / np.sqrt(N_GROUPS))
    value = complex(value) if np.iscomplexobj(means) else float(value)
    return MCEstimate(value, err, int(mc.n_samples))


def _gamma_draw(shape, scale):
    if not scale > 0:
        raise InvalidParameterError("the sampled law needs a positive scale")
    return lambda rng, size: rng.gamma(shape, scale, size=size)


def mc_phase_average(omega: float, t: float, s: ScalingTimes, mc: MCSettings) -> MCEstimate:
    """Average of ``exp(-i omega t')`` over random evolution times."""
    d = WaitingTimeDistribution(t, s)
    return _estimate(_gamma_draw(d.shape, d.scale), lambda x: np.exp(-1j * omega * x), mc)


def mc_observable_average(observable_fn: Callable, t: float, s: ScalingTimes, mc: MCSettings) -> MCEstimate:
    """Average of a real observable of the evolution time.

    ``observable_fn`` receives a numpy array of evolution times and must
    return an array of the same shape (or a scalar for constants).
    """
    d = WaitingTimeDistribution(t, s)
    return _estimate(_gamma_draw(d.shape, d.scale), observable_fn, mc)


def mc_pulse_area_average(omega_tilde: float, mean_rabi: float, tau: float, t: float, mc: MCSettings) -> MCEstimate:
    """Average of ``exp(-i omega_tilde A)`` over random pulse areas ``A``."""
    p = PulseAreaDistribution(t, mean_rabi, tau)
    return _estimate(_gamma_draw(p.shape, p.scale), lambda a: np.exp(-1j * omega_tilde * a), mc)


def mc_pulse_area_observable(observable_fn: Callable, mean_rabi: float, tau: float, t: float, mc: MCSettings) -> MCEstimate:
    """Average of a real function of the pulse area."""
    p = PulseAreaDistribution(t, mean_rabi, tau)
    return _estimate(_gamma_draw(p.shape, p.scale), observable_fn, mc)


def combined_z(estimate: MCEstimate, reference) -> float:
    """Distance to ``reference`` in units of the estimate's standard error."""
    diff = abs(complex(estimate.value) - complex(reference))
    if estimate.std_error == 0.0:
        return 0.0 if diff == 0.0 else np.inf
    return diff / estimate.std_error
