"""Scenario configuration files: parsing and schema validation.

A configuration is an INI file with one scenario::

    [run]
    scenario = rabi-qed
    output = rabi.csv

    [params]
    rabi_khz = 25
    tau = 0.5e-6

    [grid]
    t_start = 0
    t_stop = 200e-6
    n_points = 401

    [mc]            ; optional
    n_samples = 20000
    seed = 7

Times are in seconds. Frequency keys take angular units (rad/s) under their
bare name, or cyclic kHz with a ``_khz`` suffix (converted by ``2 pi 1e3``).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .exceptions import ConfigError
from .gamma_kernel import DEFAULT_SEED
from .monte_carlo import N_GROUPS, MCSettings

KHZ = 2.0 * math.pi * 1e3

FREQ, TIME, DIMLESS, INT = "frequency", "time", "dimensionless", "integer"


@dataclass(frozen=True)
class Key:
    kind: str
    bound: str = "any"  # 'any' | 'nonneg' | 'pos'
    default: float | None = None  # None means required
    doc: str = ""


@dataclass(frozen=True)
class Scenario:
    name: str
    summary: str
    params: dict
    grid: str  # 't' or 'delta'
    one_of: tuple = ()  # groups of mutually exclusive keys, exactly one required
    needs_mc: bool = False
    grid_starts_at_zero: bool = False


SCENARIOS = {
    s.name: s
    for s in [
        Scenario(
            "rabi-qed",
            "vacuum Rabi oscillation averaged over the interaction time",
            {
                "rabi": Key(FREQ, "pos", doc="Omega_R"),
                "tau": Key(TIME, "nonneg", doc="time-fluctuation strength"),
            },
            "t",
        ),
        Scenario(
            "ramsey",
            "Ramsey fringes versus detuning with time-of-flight averaging",
            {
                "dispersive_shift": Key(FREQ, doc="Omega_R^2/delta"),
                "waist_ratio": Key(DIMLESS, "pos", doc="w/d in (0, 1]"),
                "flight_time": Key(TIME, "pos", doc="T"),
                "mean_photon": Key(DIMLESS, "nonneg", 0.0, doc="mean photon number"),
                "tau": Key(TIME, "nonneg", doc="time-fluctuation strength"),
            },
            "delta",
        ),
        Scenario(
            "ion",
            "trapped-ion blue-sideband oscillation and Rabi-frequency power law",
            {
                "base_rabi": Key(FREQ, "pos", doc="Omega (bare Raman Rabi frequency)"),
                "omega0": Key(FREQ, "pos", doc="Omega_0, the n=0 sideband frequency"),
                "eta": Key(DIMLESS, "pos", doc="Lamb-Dicke parameter"),
                "tau": Key(TIME, "nonneg", doc="pulse-area fluctuation strength"),
                "fock_n": Key(INT, "nonneg", 0, doc="initial vibrational Fock state"),
                "n_max": Key(INT, "nonneg", 16, doc="largest n in the ratio table"),
            },
            "t",
            one_of=(("base_rabi", "omega0"),),
        ),
        Scenario(
            "interrupted",
            "staircase F(t) of periodically interrupted evolution",
            {
                "tau1": Key(TIME, "pos", doc="on-time per period"),
                "tau2": Key(TIME, "pos", doc="period"),
            },
            "t",
        ),
        Scenario(
            "mc-check",
            "Monte Carlo phase average against the closed-form propagator factor",
            {
                "omega": Key(FREQ, doc="Bohr frequency"),
                "tau": Key(TIME, "pos", doc="tau1 = tau2"),
            },
            "t",
            needs_mc=True,
        ),
        Scenario(
            "master-eq",
            "qubit coherence under the second-order phase-destroying master equation",
            {
                "omega": Key(FREQ, doc="qubit splitting"),
                "tau": Key(TIME, "nonneg"),
                "dt": Key(TIME, "pos", 0.0, doc="integrator step; 0 picks the default"),
            },
            "t",
            grid_starts_at_zero=True,
        ),
        Scenario(
            "gamma-diag",
            "density and CDF of the evolution-time distribution",
            {
                "clock_time": Key(TIME, "pos"),
                "tau1": Key(TIME, "pos"),
                "tau2": Key(TIME, "pos"),
                "omega": Key(FREQ, "any", 0.0, doc="frequency for the integral-identity check"),
            },
            "t",
        ),
    ]
}

GRID_KEYS = {"t": ("t_start", "t_stop"), "delta": ("delta_start", "delta_stop")}


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict
    grid: dict
    mc: MCSettings | None = None
    output_path: str | None = None
    source: dict = field(default_factory=dict)  # raw values as written, for the report


def _number(raw, kind):
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError("not finite")
    if kind == INT:
        if value != int(value):
            raise ValueError("not an integer")
        return int(value)
    return value


def _bound_ok(value, bound):
    return bound == "any" or (bound == "nonneg" and value >= 0) or (bound == "pos" and value > 0)


_BOUND_TEXT = {"nonneg": ">= 0", "pos": "> 0"}


def _read_param(section, name, key, diags, source, where="params"):
    """Return the SI value of ``name`` or None; accepts ``name_khz`` for frequencies."""
    names = [name] + ([name + "_khz"] if key.kind == FREQ else [])
    present = [n for n in names if n in section]
    if len(present) > 1:
        diags.append(f"[{where}] give only one of {', '.join(present)}")
        return None
    if not present:
        return None
    used = present[0]
    try:
        value = _number(section[used], key.kind)
    except ValueError:
        diags.append(f"[{where}] {used} = {section[used]!r} is not a valid {key.kind} value")
        return None
    source[used] = section[used]
    if used.endswith("_khz"):
        value = value * KHZ
    if not _bound_ok(value, key.bound):
        diags.append(f"[{where}] {used} must be {_BOUND_TEXT[key.bound]}, got {section[used]}")
        return None
    return value


def _parse(parser: configparser.ConfigParser, diags: list) -> ScenarioConfig | None:
    run = parser["run"] if parser.has_section("run") else {}
    name = run.get("scenario")
    if name is None:
        diags.append("[run] missing required key 'scenario'")
        return None
    if name not in SCENARIOS:
        diags.append(f"[run] unknown scenario {name!r}; expected one of {', '.join(SCENARIOS)}")
        return None
    sc = SCENARIOS[name]
    for key in run:
        if key not in ("scenario", "output"):
            diags.append(f"[run] unknown key {key!r}")

    section = parser["params"] if parser.has_section("params") else {}
    params, source = {}, {}
    grouped = {k for group in sc.one_of for k in group}
    for pname, key in sc.params.items():
        value = _read_param(section, pname, key, diags, source)
        if value is not None:
            params[pname] = value
        elif key.default is not None:
            params[pname] = key.default
        elif pname not in grouped and not any(n in section for n in (pname, pname + "_khz")):
            diags.append(f"[params] missing required key '{pname}'")
    for group in sc.one_of:
        present = [k for k in group if k in section or k + "_khz" in section]
        if len(present) != 1:
            diags.append(f"[params] give exactly one of {', '.join(group)}")
    allowed = {n for p, k in sc.params.items() for n in ([p, p + "_khz"] if k.kind == FREQ else [p])}
    for key in section:
        if key not in allowed:
            diags.append(f"[params] unknown key {key!r} for scenario {name}")

    grid = {}
    gsec = parser["grid"] if parser.has_section("grid") else {}
    start_key, stop_key = GRID_KEYS[sc.grid]
    gkind = TIME if sc.grid == "t" else FREQ
    for gname in (start_key, stop_key):
        key = Key(gkind, "nonneg" if gkind == TIME else "any")
        value = _read_param(gsec, gname, key, diags, source, "grid")
        if value is None and not any(n in gsec for n in (gname, gname + "_khz")):
            diags.append(f"[grid] missing required key '{gname}'")
        elif value is not None:
            grid[gname] = value
    if "n_points" not in gsec:
        diags.append("[grid] missing required key 'n_points'")
    else:
        try:
            n_points = _number(gsec["n_points"], INT)
        except ValueError:
            n_points = None
        if n_points is None or n_points < 2:
            diags.append(f"[grid] n_points must be an integer >= 2, got {gsec['n_points']}")
        else:
            grid["n_points"] = n_points
    if start_key in grid and stop_key in grid and not grid[start_key] < grid[stop_key]:
        diags.append(f"[grid] {start_key} must be < {stop_key}")
    if sc.grid_starts_at_zero and grid.get(start_key, 0.0) != 0.0:
        diags.append(f"[grid] {start_key} must be 0 for scenario {name}")
    grid_allowed = {"n_points", start_key, stop_key} | (
        {start_key + "_khz", stop_key + "_khz"} if gkind == FREQ else set()
    )
    for key in gsec:
        if key not in grid_allowed:
            diags.append(f"[grid] unknown key {key!r}")

    mc = None
    if parser.has_section("mc"):
        msec = parser["mc"]
        values = {"n_samples": 100_000, "seed": DEFAULT_SEED, "batch_size": 65_536}
        ok = True
        for key in msec:
            if key not in values:
                diags.append(f"[mc] unknown key {key!r}")
                ok = False
                continue
            try:
                values[key] = int(msec[key], 0)
            except ValueError:
                diags.append(f"[mc] {key} = {msec[key]!r} is not an integer")
                ok = False
        if ok:
            if values["n_samples"] < N_GROUPS:
                diags.append(f"[mc] n_samples must be >= {N_GROUPS}")
            elif values["batch_size"] < 1:
                diags.append("[mc] batch_size must be >= 1")
            elif not 0 <= values["seed"] < 2**64:
                diags.append("[mc] seed must fit in 64 unsigned bits")
            else:
                mc = MCSettings(**values)
    elif sc.needs_mc:
        mc = MCSettings()

    return ScenarioConfig(name, params, grid, mc, run.get("output"), source)


def read_config(path) -> tuple[ScenarioConfig | None, list[str]]:
    """Parse ``path``; return the config (None if invalid) and all diagnostics."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path, encoding="utf-8") as fh:
        try:
            parser.read_file(fh)
        except configparser.Error as exc:
            return None, [f"syntax error: {exc}"]
    diags = [f"unknown section [{name}]" for name in parser.sections() if name not in ("run", "params", "grid", "mc")]
    cfg = _parse(parser, diags)
    return (cfg if not diags else None), diags


def validate(path) -> list[str]:
    """All schema violations in the file at ``path`` (empty when valid)."""
    return read_config(path)[1]


def load(path) -> ScenarioConfig:
    cfg, diags = read_config(path)
    if diags:
        raise ConfigError(diags)
    return cfg
