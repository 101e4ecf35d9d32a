"""Evolution switched on for ``tau1`` out of every period ``tau2``."""

from __future__ import annotations

import numpy as np

from ..exceptions import InvalidParameterError
from ..gamma_kernel import ScalingTimes


def _check(s: ScalingTimes):
    if not s.tau1 > 0:
        raise InvalidParameterError("tau1 must be > 0")
    if s.tau1 > s.tau2:
        raise InvalidParameterError(f"need tau1 <= tau2, got tau1={s.tau1}, tau2={s.tau2}")


def interrupted_F(t, s: ScalingTimes):
    """Total time the Hamiltonian has acted by clock time ``t`` (a staircase).

    With ``n = floor(t / tau2)``: ``F = t + n (tau1 - tau2)`` while the
    Hamiltonian is on, and ``(n + 1) tau1`` while it is off.
    """
    _check(s)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("t must be >= 0")
    n = np.floor(t / s.tau2)
    # t / tau2 can round up to an integer just below a period boundary
    within = np.maximum(t - n * s.tau2, 0.0)
    # plateau written as (n+1) tau1 so it matches the next ramp's start bit for bit
    out = np.minimum(n * s.tau1 + within, (n + 1.0) * s.tau1)
    return out if out.ndim else float(out)


def rescaled_time(t, s: ScalingTimes):
    """Linear approximation ``t tau1 / tau2`` of :func:`interrupted_F`."""
    _check(s)
    return np.asarray(t, dtype=float) * (s.tau1 / s.tau2)
