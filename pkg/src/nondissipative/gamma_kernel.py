"""Gamma-distributed evolution times and pulse areas.

The averaged dynamics replaces a fixed clock time ``t`` by a random evolution
time ``t'`` drawn from a Gamma law with shape ``t / tau2`` and scale ``tau1``.
This module evaluates that density, its moments and samples, and provides the
quadrature machinery used as an independent check on the closed forms
elsewhere in the package.

All quadrature is done on the standardized variable ``y = t' / scale``. For
shapes below one the integrable singularity at the origin is handled by
QUADPACK's algebraic weight rather than by truncating near zero, so
normalization stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize, special

from .exceptions import InvalidParameterError, QuadratureError

DEFAULT_SEED = 0xDEC0E5E

# mass discarded in each tail when truncating the integration range
TAIL_MASS = 1e-12
EPSABS = 1e-12
EPSREL = 1e-11
QUAD_LIMIT = 2000
# quad reports "did not converge" on purely round-off limited integrals;
# only treat it as a failure above this estimated error
_FAIL_ABSERR = 1e-8


def _check_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class ScalingTimes:
    """The two scaling times ``(tau1, tau2)`` in seconds.

    Continuous evolution uses ``tau1 == tau2``; see :meth:`equal`.
    """

    tau1: float
    tau2: float

    def __post_init__(self):
        _check_positive("tau2", self.tau2)
        if not (np.isfinite(self.tau1) and self.tau1 >= 0):
            raise InvalidParameterError(f"tau1 must be finite and >= 0, got {self.tau1!r}")

    @classmethod
    def equal(cls, tau: float) -> "ScalingTimes":
        return cls(tau, tau)


@dataclass(frozen=True)
class WaitingTimeDistribution:
    """Law of the random evolution time for a given clock time.

    Gamma with shape ``clock_time / tau2`` and scale ``tau1``.
    """

    clock_time: float
    scaling: ScalingTimes
    rng_seed: int = DEFAULT_SEED

    def __post_init__(self):
        _check_positive("clock_time", self.clock_time)

    @property
    def shape(self) -> float:
        return self.clock_time / self.scaling.tau2

    @property
    def scale(self) -> float:
        return self.scaling.tau1


@dataclass(frozen=True)
class PulseAreaDistribution:
    """Law of the dimensionless pulse area under a fluctuating Rabi frequency.

    Gamma with shape ``clock_time / tau`` and scale ``mean_rabi * tau``, so the
    mean area is ``mean_rabi * clock_time``.
    """

    clock_time: float
    mean_rabi: float
    tau: float
    rng_seed: int = DEFAULT_SEED

    def __post_init__(self):
        _check_positive("clock_time", self.clock_time)
        _check_positive("mean_rabi", self.mean_rabi)
        _check_positive("tau", self.tau)

    @property
    def shape(self) -> float:
        return self.clock_time / self.tau

    @property
    def scale(self) -> float:
        return self.mean_rabi * self.tau


def gamma_pdf(x, shape: float, scale: float):
    """Gamma density evaluated through logarithms (safe for shapes up to ~1e6).

    At ``x == 0`` the value is 0 for ``shape > 1``, ``1/scale`` for
    ``shape == 1`` and ``+inf`` for ``shape < 1``.
    """
    _check_positive("shape", shape)
    _check_positive("scale", scale)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidParameterError("density is only defined for non-negative times")
    y = x / scale
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = -y + special.xlogy(shape - 1.0, y) - math.log(scale) - special.gammaln(shape)
        out = np.exp(logp)
    if shape < 1:
        out = np.where(y == 0, np.inf, out)
    out = out if out.ndim else float(out)
    return out


def density(d: WaitingTimeDistribution, t_prime):
    """Probability density of the evolution time ``t_prime`` (units 1/s).

    Raises :class:`InvalidParameterError` for ``tau1 == 0`` (the law is then a
    point mass at zero and has no density).
    """
    return gamma_pdf(t_prime, d.shape, d.scale)


def density_rescaled(t: float, t_dprime, tau2: float):
    """Density of the rescaled time ``t'' = (tau2/tau1) t'``; depends on ``tau2`` only."""
    _check_positive("t", t)
    _check_positive("tau2", tau2)
    return gamma_pdf(t_dprime, t / tau2, tau2)


def cdf(d: WaitingTimeDistribution, t_prime):
    """Cumulative distribution (regularized lower incomplete gamma)."""
    _check_positive("scale", d.scale)
    return special.gammainc(d.shape, np.asarray(t_prime, dtype=float) / d.scale)


def moments(t: float, s: ScalingTimes) -> tuple[float, float]:
    """Mean and variance of the evolution time for clock time ``t``."""
    _check_positive("t", t)
    mean = s.tau1 / s.tau2 * t
    variance = s.tau1**2 / s.tau2 * t
    return mean, variance


def sample(d: WaitingTimeDistribution | PulseAreaDistribution, count: int) -> np.ndarray:
    """Draw ``count`` independent values; identical output for identical seeds.

    Uses numpy's Generator, whose Gamma sampler (Marsaglia-Tsang with the
    shape-boost for ``shape < 1``) is exact for every positive shape.
    """
    if int(count) != count or count < 1:
        raise InvalidParameterError(f"count must be a positive integer, got {count!r}")
    _check_positive("scale", d.scale)
    rng = np.random.default_rng(d.rng_seed)
    return rng.gamma(d.shape, d.scale, size=int(count))


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


def _quad(fun, a, b, **kwargs):
    out = integrate.quad(
        fun, a, b, epsabs=EPSABS, epsrel=EPSREL, limit=QUAD_LIMIT, full_output=1, **kwargs
    )
    value, abserr = out[0], out[1]
    if len(out) > 3 and abserr > _FAIL_ABSERR:
        raise QuadratureError(f"quad on [{a}, {b}] failed: {out[3]!r} (abserr={abserr:.3g})")
    return value


def standard_support(shape: float, tail: float = TAIL_MASS) -> tuple[float, float]:
    """Integration window of the unit-scale Gamma law, dropping ``tail`` per side."""
    hi = float(special.gammainccinv(shape, tail))
    lo = float(special.gammaincinv(shape, tail)) if shape >= 1 else 0.0
    return lo, hi


def _std_pdf(shape):
    lg = special.gammaln(shape)

    def pdf(y):
        if y <= 0:
            return 0.0 if shape > 1 else (1.0 if shape == 1 else math.inf)
        return math.exp(-y + (shape - 1.0) * math.log(y) - lg)

    return pdf


def _std_expectation(g: Callable[[float], float], shape: float, weight=None, wvar=None) -> float:
    """E[g(Y)] for Y ~ Gamma(shape, 1), optionally with a cos/sin weight on ``g``.

    With ``weight='cos'`` (or ``'sin'``) the integrand is ``g(y) * cos(wvar*y)``
    and QUADPACK's oscillatory rules are used on the regular part.
    """
    lo, hi = standard_support(shape)
    pdf = _std_pdf(shape)
    lg = special.gammaln(shape)
    osc = {"cos": math.cos, "sin": math.sin}
    total = 0.0
    if shape < 1:
        # x^(shape-1) singularity at 0: algebraic weight on [0, head]
        head = min(1.0, hi)
        if weight is None:
            h = lambda y: g(y) * math.exp(-y - lg)
        else:
            trig = osc[weight]
            h = lambda y: g(y) * math.exp(-y - lg) * trig(wvar * y)
        total += _quad(h, 0.0, head, weight="alg", wvar=(shape - 1.0, 0.0))
        lo = head
    if hi > lo:
        body = lambda y: g(y) * pdf(y)
        if weight is None:
            mode = max(shape - 1.0, 0.0)
            points = [mode] if lo < mode < hi else None
            total += _quad(body, lo, hi, points=points)
        else:
            total += _quad(body, lo, hi, weight=weight, wvar=wvar)
    return total


def time_average(func: Callable[[float], float], t: float, s: ScalingTimes) -> float:
    """Quadrature of ``func`` against the evolution-time density.

    ``func`` is a real scalar function of the evolution time. Returns
    ``integral_0^inf P(t, t') func(t') dt'``.
    """
    d = WaitingTimeDistribution(t, s)
    _check_positive("tau1", d.scale)
    theta = d.scale
    return _std_expectation(lambda y: func(theta * y), d.shape)


def phase_average_quadrature(omega: float, shape: float, scale: float) -> complex:
    """E[exp(-i omega X)] for X ~ Gamma(shape, scale), by oscillatory quadrature."""
    _check_positive("shape", shape)
    _check_positive("scale", scale)
    b = float(omega) * scale
    one = lambda y: 1.0
    if b == 0.0:
        return complex(_std_expectation(one, shape), 0.0)
    re = _std_expectation(one, shape, weight="cos", wvar=b)
    im = -_std_expectation(one, shape, weight="sin", wvar=b)
    return complex(re, im)


def gamma_identity_residual(omega: float, t: float, s: ScalingTimes) -> float:
    """Residual of the Gamma-function integral identity with unit hermitian part.

    Compares ``(1/Gamma(k)) integral lam^(k-1) e^(-lam) e^(-i lam omega tau1) dlam``
    (by quadrature) against the principal power ``(1 + i omega tau1)^(-k)``,
    with ``k = t / tau2``.
    """
    _check_positive("t", t)
    k = t / s.tau2
    b = float(omega) * s.tau1
    lhs = phase_average_quadrature(b, k, 1.0)
    rhs = complex(np.power(1.0 + 1j * b, -k))
    return abs(lhs - rhs)


def gaussian_limit_distance(p: PulseAreaDistribution) -> float:
    """L1 distance between the pulse-area law and its moment-matched Gaussian.

    The Gaussian has mean ``mean_rabi*t`` and variance ``mean_rabi**2*t*tau``;
    its mass on negative areas counts toward the distance. The distance is
    scale free, so the computation is done at unit scale.
    """
    k = p.shape
    if k < 1:
        raise InvalidParameterError("gaussian_limit_distance requires clock_time/tau >= 1")
    sd = math.sqrt(k)
    pdf = _std_pdf(k)
    norm_c = 1.0 / math.sqrt(2 * math.pi * k)
    diff = lambda y: pdf(y) - norm_c * math.exp(-((y - k) ** 2) / (2 * k))
    hi = k + 40 * sd + 40
    grid = np.linspace(0.0, hi, 8001)
    vals = np.array([diff(y) for y in grid])
    breaks = [0.0]
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        breaks.append(optimize.brentq(diff, grid[i], grid[i + 1], xtol=1e-14))
    breaks.append(hi)
    total = sum(abs(_quad(diff, a, b)) for a, b in zip(breaks[:-1], breaks[1:]))
    return total + float(special.ndtr(-sd))
