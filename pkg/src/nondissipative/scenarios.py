"""Runners that turn a :class:`ScenarioConfig` into CSV tables and a report.

Each runner returns ``(tables, derived)``: ``tables`` maps a file suffix
(``""`` for the main CSV) to ``(header, rows)``; ``derived`` holds the
quantities recorded in the run report.
"""

from __future__ import annotations

import csv
import json
import math
import platform
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import gamma_kernel as gk
from . import master_equation as me
from .analysis import fit_damped_cosine, fit_power_law
from .config import GRID_KEYS, SCENARIOS
from .exceptions import FitError, RegimeWarning
from .models import cavity, interrupted, ion, ramsey
from .monte_carlo import combined_z, mc_observable_average, mc_phase_average, mc_pulse_area_observable
from .propagator import propagator_factor

MAIN_COLUMNS = {
    "rabi-qed": ["t_s", "p_ideal", "p_averaged"],
    "ion": ["t_s", "p_ideal", "p_averaged"],
    "ramsey": ["delta_rad_s", "p_theory", "p_averaged", "p_gaussian", "visibility"],
    "interrupted": ["t", "F", "linear_approx", "abs_err"],
    "mc-check": ["t_s", "analytic_re", "analytic_im", "mc_re", "mc_im", "mc_stderr", "z_score"],
    "master-eq": ["t_s", "re_rho01", "im_rho01", "purity", "trace"],
    "gamma-diag": ["t_prime", "density", "cdf"],
}
MC_COLUMNS = ["p_mc", "p_mc_stderr"]
RATIO_COLUMNS = ["n", "omega_ratio", "power_law_reference", "power_law_fitted", "gamma_n"]


def grid_values(cfg):
    start_key, stop_key = GRID_KEYS[SCENARIOS[cfg.scenario].grid]
    return np.linspace(cfg.grid[start_key], cfg.grid[stop_key], cfg.grid["n_points"])


def _fit_report(t, y):
    try:
        fit = fit_damped_cosine(t, y)
    except FitError as exc:
        return None, {"fit_error": str(exc)}
    return fit, {
        "fit_gamma_per_s": fit.gamma,
        "fit_decay_time_s": (1.0 / fit.gamma) if fit.gamma > 0 else math.inf,
        "fit_nu_rad_s": fit.nu,
        "fit_rms_residual": fit.rms_residual,
    }


def run_rabi_qed(cfg):
    p = cavity.RabiQEDParams(cfg.params["rabi"], cfg.params["tau"])
    t = grid_values(cfg)
    cols = [t, cavity.jc_p_eg_ideal(p, t), cavity.jc_p_eg_averaged(p, t)]
    header = list(MAIN_COLUMNS["rabi-qed"])
    if cfg.mc is not None:
        mean, err = _mc_time_series(t, p.tau, lambda x: cavity.jc_p_eg_ideal(p, x), cfg.mc)
        cols += [mean, err]
        header += MC_COLUMNS

    gamma, nu = cavity.jc_rates(p)
    gamma_small = cavity.jc_gamma_small_tau(p)
    derived = {
        "rabi_rad_s": p.rabi_frequency,
        "gamma_exact_per_s": gamma,
        "nu_exact_rad_s": nu,
        "gamma_small_tau_per_s": gamma_small,
        "decay_time_exact_s": 1.0 / gamma if gamma > 0 else math.inf,
        "decay_time_small_tau_s": 1.0 / gamma_small if gamma_small > 0 else math.inf,
        "rabi_tau_product": p.rabi_frequency * p.tau,
    }
    fit, info = _fit_report(t, cols[2])
    derived.update(info)
    if fit is not None and fit.gamma > 0:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            derived["tau_estimate_from_fit_s"] = cavity.jc_estimate_tau(fit.gamma, p.rabi_frequency)
    return {"": (header, np.column_stack(cols))}, derived


def _mc_time_series(t, tau, observable, mc, *, pulse_area_rabi=None):
    """Monte Carlo column for a time grid; ``t = 0`` and ``tau = 0`` are deterministic."""
    mean = np.empty_like(t)
    err = np.zeros_like(t)
    for i, ti in enumerate(t):
        if ti == 0 or tau == 0:
            x = ti if pulse_area_rabi is None else ti * pulse_area_rabi
            mean[i] = float(observable(np.array(x)))
            continue
        if pulse_area_rabi is None:
            est = mc_observable_average(observable, ti, gk.ScalingTimes.equal(tau), mc)
        else:
            est = mc_pulse_area_observable(observable, pulse_area_rabi, tau, ti, mc)
        mean[i], err[i] = est.value, est.std_error
    return mean, err


def _ion_params(cfg):
    eta = cfg.params["eta"]
    base = cfg.params.get("base_rabi")
    if base is None:
        base = cfg.params["omega0"] / (eta * math.exp(-eta * eta / 2))
    return ion.IonParams(base, eta, cfg.params["tau"], cfg.params["fock_n"])


def run_ion(cfg):
    p = _ion_params(cfg)
    n_max = max(int(cfg.params["n_max"]), 4)
    t = grid_values(cfg)
    omega_n = ion.ion_rabi_frequency(p)
    cols = [t, ion.ion_p_down_ideal(p, t), ion.ion_p_down(p, t)]
    header = list(MAIN_COLUMNS["ion"])
    if cfg.mc is not None:
        # the sideband oscillates at 2 Omega_n = (2 Omega_n / Omega) * Omega
        omega_tilde = 2.0 * omega_n / p.base_rabi
        mean, err = _mc_time_series(
            t, p.tau, lambda a: 0.5 * (1.0 + np.cos(omega_tilde * a)), cfg.mc, pulse_area_rabi=p.base_rabi
        )
        cols += [mean, err]
        header += MC_COLUMNS

    summary = ion.ion_power_law_exponents(p.eta, n_max)
    ns = np.arange(n_max + 1)
    ratios = ion.rabi_ratios(p.eta, n_max)
    omega0 = ion.rabi_frequency_for(p.base_rabi, p.eta, 0)
    gamma_n = 2.0 * (omega0 * ratios) ** 2 * p.tau
    pl = fit_power_law(ns, ratios)
    ratio_rows = np.column_stack(
        [ns, ratios, (ns + 1.0) ** ion.REFERENCE_FREQ_EXPONENT, pl.prefactor * (ns + 1.0) ** pl.exponent, gamma_n]
    )
    derived = {
        "base_rabi_rad_s": p.base_rabi,
        "omega0_rad_s": omega0,
        "omega_n_rad_s": omega_n,
        "gamma_n_per_s": ion.ion_decay_rate(p),
        "gamma_n_exact_per_s": ion.ion_decay_rate(p, exact=True),
        "freq_exponent": summary.freq_exponent,
        "decay_exponent": summary.decay_exponent,
        "fitted_residual": summary.max_residual,
        "anchored_residual": summary.anchored_residual,
        "reference_exponent_residual": summary.reference_exponent_residual,
    }
    if p.tau > 0:
        derived["decay_exponent_from_gamma_fit"] = fit_power_law(ns, gamma_n).exponent
    fit, info = _fit_report(t, cols[2])
    derived.update(info)
    if fit is not None and fit.gamma > 0:
        tau_est = ion.ion_estimate_tau(fit.gamma, omega_n)
        derived["tau_estimate_from_fit_s"] = tau_est
        if p.tau > 0:
            derived["tau_relative_error"] = abs(tau_est - p.tau) / p.tau
    tables = {"": (header, np.column_stack(cols)), ".ratios": (RATIO_COLUMNS, ratio_rows)}
    return tables, derived


def run_ramsey(cfg):
    q = cfg.params
    p = ramsey.RamseyParams(0.0, q["dispersive_shift"], q["waist_ratio"], q["flight_time"], q["mean_photon"], q["tau"])
    delta = grid_values(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        gauss = ramsey.ramsey_p_eg_gaussian(p, delta)
    exact = ramsey.ramsey_p_eg_averaged(p, delta)
    rows = np.column_stack(
        [delta, ramsey.ramsey_p_eg_theory(p, delta), exact, gauss, ramsey.ramsey_visibility(p, delta)]
    )
    x = ramsey.fringe_offset(p, delta)
    derived = {
        "epsilon_n_rad_s": float(ramsey.ramsey_epsilon_n(p)),
        "gaussian_regime_violations": int(np.sum(np.abs(x) * p.tau > ramsey.GAUSSIAN_REGIME_LIMIT)),
    }
    if p.tau > 0:
        sigma = ramsey.ramsey_width(p)
        small = np.abs(x) * p.tau <= 0.15
        derived.update(
            {
                "sigma_delta_rad_s": sigma,
                "sigma_delta_khz_cyclic": sigma / (2 * math.pi * 1e3),
                "max_gaussian_vs_exact_small_offset": float(np.max(np.abs(gauss - exact)[small]))
                if np.any(small)
                else None,
            }
        )
    return {"": (MAIN_COLUMNS["ramsey"], rows)}, derived


def run_interrupted(cfg):
    s = gk.ScalingTimes(cfg.params["tau1"], cfg.params["tau2"])
    t = grid_values(cfg)
    F = interrupted.interrupted_F(t, s)
    lin = interrupted.rescaled_time(t, s)
    err = np.abs(F - lin)
    derived = {
        "max_abs_err": float(err.max()),
        "abs_err_bound": s.tau2 - s.tau1,
        "within_bound": bool(err.max() <= s.tau2 - s.tau1),
    }
    return {"": (MAIN_COLUMNS["interrupted"], np.column_stack([t, F, lin, err]))}, derived


def run_mc_check(cfg):
    omega, tau = cfg.params["omega"], cfg.params["tau"]
    s = gk.ScalingTimes.equal(tau)
    rows = []
    for ti in grid_values(cfg):
        exact = complex(propagator_factor(omega, ti, s))
        if ti == 0:
            rows.append([ti, exact.real, exact.imag, 1.0, 0.0, 0.0, 0.0])
            continue
        est = mc_phase_average(omega, ti, s, cfg.mc)
        rows.append([ti, exact.real, exact.imag, est.value.real, est.value.imag, est.std_error, combined_z(est, exact)])
    rows = np.array(rows)
    derived = {
        "max_z_score": float(rows[:, 6].max()),
        "all_within_5_sigma": bool(rows[:, 6].max() <= 5.0),
        "n_samples": cfg.mc.n_samples,
        "seed": cfg.mc.seed,
    }
    return {"": (MAIN_COLUMNS["mc-check"], rows)}, derived


def run_master_eq(cfg):
    omega, tau = cfg.params["omega"], cfg.params["tau"]
    H = 0.5 * omega * np.diag([1.0, -1.0]).astype(complex)
    rho0 = 0.5 * np.ones((2, 2), dtype=complex)
    t = grid_values(cfg)
    spacing = t[1] - t[0]
    dt = cfg.params["dt"] or me.default_step(H, tau)
    per_sample = max(1, int(math.ceil(spacing / dt - 1e-9)))
    settings = me.IntegratorSettings(spacing / per_sample, t[-1], store_every=per_sample)
    traj = me.integrate_second_order(H, rho0, tau, settings)
    rho01 = traj.coherence(0, 1)
    rows = np.column_stack([traj.times, rho01.real, rho01.imag, traj.purity(), traj.trace()])
    reference = me.solve_second_order_exact(H, rho0, tau, traj.times)
    mag = np.abs(rho01)
    keep = mag > 1e-300
    slope = np.polyfit(traj.times[keep], np.log(mag[keep]), 1)[0]
    gap = me.exact_vs_second_order_gap(omega, tau) if tau > 0 else None
    derived = {
        "integrator_step_s": settings.t_final / settings.n_steps,
        "fitted_decay_rate_per_s": float(-slope),
        "gamma_second_order_per_s": 0.5 * omega * omega * tau,
        "gamma_exact_per_s": gap.gamma_exact if gap else 0.0,
        "exact_vs_second_order_relative_gap": gap.relative_gap if gap else 0.0,
        "max_abs_error_vs_closed_form": float(np.max(np.abs(traj.states - reference))),
        "max_trace_deviation": float(np.max(np.abs(traj.trace() - 1.0))),
    }
    return {"": (MAIN_COLUMNS["master-eq"], rows)}, derived


def run_gamma_diag(cfg):
    q = cfg.params
    s = gk.ScalingTimes(q["tau1"], q["tau2"])
    d = gk.WaitingTimeDistribution(q["clock_time"], s)
    tp = grid_values(cfg)
    dens = np.atleast_1d(gk.density(d, tp))
    rows = np.column_stack([tp, dens, gk.cdf(d, tp)])
    mean, var = gk.moments(d.clock_time, s)
    derived = {
        "shape": d.shape,
        "scale_s": d.scale,
        "mean_s": mean,
        "variance_s2": var,
        "normalization_residual": abs(gk.time_average(lambda x: 1.0, d.clock_time, s) - 1.0),
        "quadrature_mean_s": gk.time_average(lambda x: x, d.clock_time, s),
        "gamma_identity_residual": gk.gamma_identity_residual(q["omega"], d.clock_time, s),
    }
    return {"": (MAIN_COLUMNS["gamma-diag"], rows)}, derived


RUNNERS = {
    "rabi-qed": run_rabi_qed,
    "ramsey": run_ramsey,
    "ion": run_ion,
    "interrupted": run_interrupted,
    "mc-check": run_mc_check,
    "master-eq": run_master_eq,
    "gamma-diag": run_gamma_diag,
}


@dataclass
class RunReport:
    scenario: str
    params: dict
    grid: dict
    derived: dict
    outputs: list
    wall_time_s: float
    mc: dict | None = None
    versions: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, default=_json_default, allow_nan=True)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in np.asarray(rows, dtype=float):
            writer.writerow([repr(float(v)) for v in row])


def _versions():
    from . import __version__

    return {
        "nondissipative": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def run(cfg, output_path) -> RunReport:
    """Run ``cfg``, write ``output_path`` plus its companions, and return the report.

    Companion files share the stem of ``output_path``: ``<stem>.report.json``
    always, and ``<stem>.ratios.csv`` for the ion scenario.
    """
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        tables, derived = RUNNERS[cfg.scenario](cfg)
    wall = time.perf_counter() - start

    out = Path(output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    stem = out.with_suffix("")
    written = []
    for suffix, (header, rows) in tables.items():
        path = out if suffix == "" else stem.with_name(stem.name + suffix + ".csv")
        _write_csv(path, header, rows)
        written.append(str(path))
    report_path = stem.with_name(stem.name + ".report.json")
    mc = asdict(cfg.mc) if cfg.mc is not None else None
    report = RunReport(cfg.scenario, dict(cfg.params), dict(cfg.grid), derived, written + [str(report_path)], wall, mc, _versions())
    report_path.write_text(report.to_json() + "\n", encoding="utf-8")
    return report
