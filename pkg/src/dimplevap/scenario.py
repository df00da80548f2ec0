"""Config-driven runs and parameter sweeps built on the loading and evaporation models.

A config is a JSON-compatible tree::

    {"name": ..., "species": "Cs" | {"preset": "Cs", <field overrides>},
     "reservoir": {"trap": {"kind": "quadrupole", "gradient": "10 mT/cm"}, "N": 1e9, "T": "150 uK"},
     "dimple": {"w0": "100 um", "U0": "1720 uK", "count": 1},
     "loading": {"mode": "diabatic" | "adiabatic"},
     "evap": {"N0", "T0", "eta0", "a0", "w0" | "f0", "gravity", "levitation", "tbr",
              "lifetime" | "gamma_bg", "t_end", "schedule": {...}},
     "outputs": {"csv": "traj.csv", "summary": "summary.json", "stride": 1}}

The load stage runs when ``reservoir`` and ``dimple`` are present, the
evaporation stage when ``evap`` is present. Missing N0/T0 are taken from the
load result.
"""
from __future__ import annotations

import copy
import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import numpy as np
from scipy.constants import g as g_earth, k as k_B

from . import loading as ld
from .errors import ConfigError, InvalidRegime, PhysicsError, UnknownFigure
from .evap.model import (BEC_REACHED, LEVITATED_G, EvapSetup, EvapState, Trajectory,
                         integrate)
from .evap.schedule import WAIST_POLICIES, ControlSchedule, Constant, ExponentialDecay
from .potentials import GaussianDimple, Harmonic, PotentialSpec, PowerLaw, Quadrupole
from .species import AtomSpecies, get_species
from .thermo import DimpleLoadResult, SampleState, adiabatic_load, diabatic_load, dimple_analytic
from .units import angular_frequency_si, energy_si, to_si

CSV_COLUMNS = ("t_s", "N", "T_K", "D", "Gamma_el_s", "p_coll", "Gamma3_over_Gammaev", "alpha_g",
               "eta", "omega_rad_s", "a_m", "w0_m", "gamma", "dDoverD_s")
OUTDIR_ENV = "DIMPLEVAP_OUTDIR"
FLOAT_FMT = ".10e"

# strategy diagnostics: Gamma_el above 3 omega is hydrodynamic, above
# 300 T(uK) s^-1 three-body losses take over
HYDRO_LIMIT = 3.0
TBR_LIMIT_PER_UK = 300.0
ADIABATIC_OK_FRACTION = 0.9


# --------------------------------------------------------------------------
# config parsing


def _get(node, key, kind, default=None, required=False):
    if key not in node:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return kind(node[key])
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {node[key]!r}") from exc


def _species(node) -> AtomSpecies:
    if isinstance(node, str):
        try:
            return get_species(node)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    if not isinstance(node, dict) or "preset" not in node:
        raise ConfigError("species must be a preset name or a mapping with a 'preset' key")
    sp = _species(node["preset"])
    units = {"mass": "kg", "scattering_length": "m", "magnetic_moment": "J/T",
             "recoil_temperature": "K", "background_rate": "1/s",
             "laser_heating_rate": "1/s"}
    changes = {}
    for key, value in node.items():
        if key == "preset":
            continue
        if key == "name":
            changes[key] = str(value)
        elif key == "laser_reference_depth":
            changes[key] = energy_si(value)
        elif key in units:
            changes[key] = to_si(value, units[key])
        else:
            raise ConfigError(f"unknown species field {key!r}")
    return sp.with_(**changes)


def _trap(node, species: AtomSpecies) -> PotentialSpec:
    kind = node.get("kind")
    if kind == "quadrupole":
        grad = to_si(node["gradient"], "T/m")
        return PotentialSpec(Quadrupole(species.magnetic_moment * grad))
    if kind == "harmonic":
        omega = angular_frequency_si(node.get("f", node.get("omega")))
        return PotentialSpec(Harmonic(omega, species.mass))
    if kind == "power_law":
        return PotentialSpec(PowerLaw(float(node["U_prime"]), float(node["delta"])))
    raise ConfigError(f"unknown reservoir trap kind {kind!r}")


def _profile(node, unit):
    if not isinstance(node, dict):
        return Constant(to_si(node, unit))
    kind = node.get("kind", "constant")
    if kind == "constant":
        return Constant(to_si(node["value"], unit))
    if kind in ("exponential_decay", "exp"):
        return ExponentialDecay(to_si(node["v0"], unit), to_si(node["v_inf"], unit),
                                to_si(node["tau"], "s"))
    raise ConfigError(f"unknown profile kind {kind!r}")


def _schedule(node) -> ControlSchedule:
    node = node or {}
    policy = node.get("waist_policy", "constant_waist")
    if policy not in WAIST_POLICIES:
        raise ConfigError(f"waist_policy must be one of {WAIST_POLICIES}")
    channels = {}
    for key, unit in (("eta", ""), ("a", "m")):
        if key in node:
            channels[key] = _profile(node[key], unit or "dimensionless")
    extra = set(node) - {"waist_policy", "eta", "a"}
    if extra:
        raise ConfigError(f"unknown schedule keys {sorted(extra)}")
    return ControlSchedule(channels, policy)


@dataclass(frozen=True)
class LoadConfig:
    reservoir_trap: PotentialSpec
    N: float
    T: float
    w0: float
    U0: float
    mode: str = "diabatic"
    crossed: bool = False


@dataclass(frozen=True)
class EvapConfig:
    eta0: float
    a0: float
    t_end: float
    schedule: ControlSchedule
    N0: Optional[float] = None
    T0: Optional[float] = None
    w0: Optional[float] = None
    omega0: Optional[float] = None
    g_eff: float = g_earth
    include_tbr: bool = True
    gamma_bg: Optional[float] = None
    crossed: bool = False
    rtol: float = 1e-8
    stop_at_bec: bool = True


@dataclass(frozen=True)
class OutputConfig:
    csv: Optional[str] = None
    summary: Optional[str] = None
    stride: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    species: AtomSpecies
    load: Optional[LoadConfig]
    evap: Optional[EvapConfig]
    outputs: OutputConfig
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a mapping")
        known = {"name", "species", "reservoir", "dimple", "loading", "evap", "outputs"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown top-level keys {sorted(extra)}")
        species = _species(d.get("species", "Cs"))
        load = None
        if "reservoir" in d or "dimple" in d:
            if not ("reservoir" in d and "dimple" in d):
                raise ConfigError("the load stage needs both 'reservoir' and 'dimple'")
            res, dim = d["reservoir"], d["dimple"]
            mode = d.get("loading", {}).get("mode", "diabatic")
            if mode not in ("diabatic", "adiabatic"):
                raise ConfigError("loading.mode must be 'diabatic' or 'adiabatic'")
            count = int(dim.get("count", 1))
            if count not in (1, 2):
                raise ConfigError("dimple.count must be 1 or 2")
            load = LoadConfig(
                reservoir_trap=_trap(res.get("trap", {}), species),
                N=_get(res, "N", float, required=True),
                T=to_si(res["T"], "K") if "T" in res else _missing("reservoir.T"),
                w0=to_si(dim["w0"], "m") if "w0" in dim else _missing("dimple.w0"),
                U0=energy_si(dim["U0"]) if "U0" in dim else _missing("dimple.U0"),
                mode=mode, crossed=count == 2)
            if not (load.N > 0 and load.T > 0 and load.w0 > 0 and load.U0 > 0):
                raise ConfigError("reservoir and dimple parameters must be positive")
        evap = None
        if "evap" in d:
            evap = _evap_config(d["evap"], load)
        out = d.get("outputs", {})
        outputs = OutputConfig(csv=out.get("csv"), summary=out.get("summary"),
                               stride=int(out.get("stride", 1)))
        if outputs.stride < 1:
            raise ConfigError("outputs.stride must be >= 1")
        return cls(name=str(d.get("name", "scenario")), species=species, load=load, evap=evap,
                   outputs=outputs, raw=copy.deepcopy(d))


def _missing(path):
    raise ConfigError(f"missing required key {path!r}")


def _evap_config(e: dict, load: Optional[LoadConfig]) -> EvapConfig:
    known = {"N0", "T0", "eta0", "a0", "w0", "f0", "omega0", "gravity", "levitation", "g", "tbr",
             "lifetime", "gamma_bg", "t_end", "schedule", "crossed", "rtol", "stop_at_bec"}
    extra = set(e) - known
    if extra:
        raise ConfigError(f"unknown evap keys {sorted(extra)}")
    if "g" in e:
        g = to_si(e["g"], "m/s^2")
    elif e.get("levitation", False) or not e.get("gravity", True):
        g = LEVITATED_G
    else:
        g = g_earth
    gamma_bg = None
    if "gamma_bg" in e:
        gamma_bg = to_si(e["gamma_bg"], "1/s")
    elif "lifetime" in e:
        gamma_bg = 1.0 / to_si(e["lifetime"], "s")
    omega0 = None
    if "f0" in e:
        omega0 = angular_frequency_si(e["f0"])
    elif "omega0" in e:
        omega0 = to_si(e["omega0"], "rad/s")
    w0 = to_si(e["w0"], "m") if "w0" in e else None
    if w0 is None and omega0 is None:
        if load is None:
            raise ConfigError("evap needs w0, f0 or omega0 when there is no dimple section")
        w0 = load.w0
    if w0 is not None and omega0 is not None:
        raise ConfigError("give only one of evap.w0 and evap.f0/omega0")
    if load is None and not ("N0" in e and "T0" in e):
        raise ConfigError("evap needs N0 and T0 when there is no load stage")
    cfg = EvapConfig(
        eta0=_get(e, "eta0", float, required=True),
        a0=to_si(e["a0"], "m") if "a0" in e else _missing("evap.a0"),
        t_end=to_si(e.get("t_end", "1 s"), "s"),
        schedule=_schedule(e.get("schedule")),
        N0=_get(e, "N0", float), T0=to_si(e["T0"], "K") if "T0" in e else None,
        w0=w0, omega0=omega0, g_eff=g, include_tbr=bool(e.get("tbr", True)),
        gamma_bg=gamma_bg, crossed=bool(e.get("crossed", load.crossed if load else False)),
        rtol=float(e.get("rtol", 1e-8)), stop_at_bec=bool(e.get("stop_at_bec", True)))
    if not cfg.t_end > 0:
        raise ConfigError("evap.t_end must be positive")
    return cfg


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return ScenarioConfig.from_dict(d)


# --------------------------------------------------------------------------
# running


@dataclass
class LoadReport:
    result: DimpleLoadResult
    timescales: ld.LoadingTimescales
    N_d0: float
    N_d0_waist: float
    t_load: Optional[float]
    t_load_adiabatic: Optional[float]
    losses: Optional[ld.LossBudget]
    sigma: float
    note: str = ""

    def to_dict(self):
        d = {"result": asdict(self.result), "timescales": asdict(self.timescales),
             "reservoir_hydrodynamic": self.timescales.hydrodynamic, "N_d0": self.N_d0,
             "N_d0_waist": self.N_d0_waist, "t_load_s": self.t_load,
             "t_load_adiabatic_s": self.t_load_adiabatic, "sigma_m2": self.sigma,
             "losses": asdict(self.losses) if self.losses else None}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class RunSummary:
    name: str
    load: Optional[LoadReport] = None
    trajectory: Optional[Trajectory] = None
    flags: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict)

    @property
    def evap(self):
        tr = self.trajectory
        if tr is None:
            return None
        return {"status": tr.status, "t_bec_s": tr.t_bec, "N": float(tr.N[-1]),
                "T_K": float(tr.T[-1]), "D": float(tr.D[-1]), "D_max": float(np.max(tr.D)),
                "t_end_s": float(tr.t[-1]), "w0_ratio": float(tr.w0[0] / tr.w0[-1]),
                "adiabatic_fraction": tr.adiabatic_fraction}

    def to_dict(self):
        return {"name": self.name, "load": self.load.to_dict() if self.load else None,
                "evap": self.evap, "flags": self.flags}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


def run_load(cfg: LoadConfig, species: AtomSpecies) -> LoadReport:
    reservoir = SampleState(cfg.N, cfg.T)
    U_laser = PotentialSpec(GaussianDimple(cfg.U0, cfg.w0))
    solve = diabatic_load if cfg.mode == "diabatic" else adiabatic_load
    res = solve(reservoir, cfg.reservoir_trap, U_laser, species)
    sigma = ld.reservoir_cross_section(species, cfg.T)
    ts = ld.timescales(reservoir, cfg.reservoir_trap, species, res.dimple_radius, sigma)
    N_d0 = ld.hydrodynamic_threshold(ts, sigma)
    note = ""
    try:
        t_load = ld.loading_time(res.transferred_atoms, cfg.N, N_d0, ts)
    except InvalidRegime as exc:
        t_load, note = None, str(exc)
    t_ad = ld.adiabatic_loading_time(t_load) if t_load is not None else None
    losses = None
    shape = cfg.reservoir_trap.shape
    if isinstance(shape, Quadrupole):
        sig_r = ld.dimple_rms_radius(cfg.U0, cfg.w0, res.final_temperature)
        B = shape.gradient_energy / species.magnetic_moment * sig_r
        losses = ld.loss_budget(res, ts, species, B, shape.gradient_energy)
    return LoadReport(result=res, timescales=ts, N_d0=N_d0,
                      N_d0_waist=ld.hydrodynamic_threshold_waist(cfg.w0, sigma),
                      t_load=t_load, t_load_adiabatic=t_ad, losses=losses, sigma=sigma, note=note)


def run_evap(cfg: EvapConfig, species: AtomSpecies, load: Optional[LoadReport] = None) -> Trajectory:
    N0 = cfg.N0 if cfg.N0 is not None else load.result.transferred_atoms
    T0 = cfg.T0 if cfg.T0 is not None else load.result.final_temperature
    setup = EvapSetup(species=species, eta0=cfg.eta0, a0=cfg.a0, w0=cfg.w0, omega0=cfg.omega0,
                      g_eff=cfg.g_eff, gamma_bg=cfg.gamma_bg, include_tbr=cfg.include_tbr,
                      crossed=cfg.crossed)
    return integrate(EvapState.from_temperature(N0, T0), cfg.schedule, cfg.t_end, setup,
                     rtol=cfg.rtol, stop_at_bec=cfg.stop_at_bec)


def trajectory_columns(tr: Trajectory, stride: int = 1) -> dict:
    """Trajectory arrays under the CSV column names, keeping the last sample."""
    idx = np.arange(0, len(tr), stride)
    if idx[-1] != len(tr) - 1:
        idx = np.append(idx, len(tr) - 1)
    return {col: np.asarray(getattr(tr, attr))[idx]
            for col, attr in zip(CSV_COLUMNS, Trajectory.COLUMNS)}


def format_csv(columns: dict, names=None) -> str:
    names = list(names or columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    n = len(columns[names[0]])
    for i in range(n):
        w.writerow([_fmt(columns[c][i]) for c in names])
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return format(x, FLOAT_FMT)


def trajectory_flags(columns: dict, adiabatic_fraction: float) -> dict:
    G = np.asarray(columns["Gamma_el_s"])
    return {
        "hydrodynamic_violated": bool(np.any(G > HYDRO_LIMIT * np.asarray(columns["omega_rad_s"]))),
        "tbr_criterion_violated": bool(np.any(G > TBR_LIMIT_PER_UK * np.asarray(columns["T_K"]) * 1e6)),
        "adiabatic_ok": bool(adiabatic_fraction >= ADIABATIC_OK_FRACTION),
    }


def resolve_outdir(outdir: Optional[str]) -> Optional[str]:
    env = os.environ.get(OUTDIR_ENV)
    return env if env else outdir


def _write(path, text):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def run_scenario(config, outdir: Optional[str] = None) -> RunSummary:
    """Load, loss budget and evaporation for one config; writes the requested files.

    ``config`` is a :class:`ScenarioConfig` or a config tree. Relative output
    paths are resolved against ``outdir`` (or the environment override).
    """
    cfg = config if isinstance(config, ScenarioConfig) else ScenarioConfig.from_dict(config)
    summary = RunSummary(name=cfg.name)
    if cfg.load is not None:
        summary.load = run_load(cfg.load, cfg.species)
    if cfg.evap is not None:
        tr = run_evap(cfg.evap, cfg.species, summary.load)
        summary.trajectory = tr
        summary.flags = trajectory_flags(trajectory_columns(tr), tr.adiabatic_fraction)
    if summary.load is not None:
        summary.flags["reservoir_hydrodynamic"] = summary.load.timescales.hydrodynamic
    outdir = resolve_outdir(outdir)
    if cfg.outputs.csv and summary.trajectory is not None:
        path = os.path.join(outdir or ".", cfg.outputs.csv)
        _write(path, format_csv(trajectory_columns(summary.trajectory, cfg.outputs.stride)))
        summary.files["csv"] = path
    if cfg.outputs.summary:
        path = os.path.join(outdir or ".", cfg.outputs.summary)
        _write(path, summary.to_json() + "\n")
        summary.files["summary"] = path
    return summary


# --------------------------------------------------------------------------
# sweeps


def set_path(tree: dict, path: str, value):
    keys = path.split(".")
    node = tree
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            raise ConfigError(f"parameter path {path!r} does not address a config entry")
        node = node[k]
    if keys[-1] not in node or isinstance(node[keys[-1]], (dict, list)):
        raise ConfigError(f"parameter path {path!r} does not address a scalar")
    node[keys[-1]] = value


SWEEP_COLUMNS = ("value", "ok", "error", "N_f", "T_f_K", "D_f", "eta_f", "t_load_s", "N_d0",
                 "two_body_fraction", "three_body_fraction", "majorana_fraction",
                 "evap_status", "t_bec_s", "N_final", "T_final_K", "D_final")


def sweep_row(tree: dict, value, with_evap=True) -> dict:
    row = {c: None for c in SWEEP_COLUMNS}
    row["value"] = str(value)
    try:
        cfg = ScenarioConfig.from_dict(tree)
        s = run_scenario(ScenarioConfig(cfg.name, cfg.species, cfg.load,
                                        cfg.evap if with_evap else None, OutputConfig(), cfg.raw))
    except (PhysicsError, ConfigError) as exc:
        row["ok"], row["error"] = False, f"{type(exc).__name__}: {exc}"
        return row
    row["ok"], row["error"] = True, ""
    if s.load is not None:
        r = s.load.result
        row.update(N_f=r.transferred_atoms, T_f_K=r.final_temperature, D_f=r.final_psd,
                   eta_f=cfg.load.U0 / (k_B * r.final_temperature), t_load_s=s.load.t_load,
                   N_d0=s.load.N_d0)
        if s.load.losses is not None:
            row.update(two_body_fraction=s.load.losses.two_body_fraction,
                       three_body_fraction=s.load.losses.three_body_fraction,
                       majorana_fraction=s.load.losses.majorana_fraction)
    if s.evap is not None:
        e = s.evap
        row.update(evap_status=e["status"], t_bec_s=e["t_bec_s"], N_final=e["N"],
                   T_final_K=e["T_K"], D_final=e["D"])
    return row


def sweep(config: dict, parameter: str, values, with_evap=True, out: Optional[str] = None):
    """One row per value of ``parameter``; failing rows are recorded and skipped."""
    if isinstance(config, ScenarioConfig):
        config = config.raw
    rows = []
    for v in values:
        tree = copy.deepcopy(config)
        set_path(tree, parameter, v)
        rows.append(sweep_row(tree, v, with_evap))
    if out:
        cols = {c: [r[c] for r in rows] for c in SWEEP_COLUMNS}
        _write(out, format_csv(cols, SWEEP_COLUMNS))
    return rows


def parse_values(text: str):
    """Comma-separated list; plain numbers become floats, the rest stay unit strings."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            out.append(float(item))
        except ValueError:
            out.append(item)
    if not out:
        raise ConfigError("empty value list")
    return out


# --------------------------------------------------------------------------
# figure reproduction


def crossing_waist(waists, N_f, N_d0):
    """Waist where N_f - N_d0 changes sign, by linear interpolation in log space."""
    w = np.asarray(waists, float)
    diff = np.log(np.asarray(N_f, float)) - np.log(np.asarray(N_d0, float))
    for i in range(len(w) - 1):
        if diff[i] == 0:
            return float(w[i])
        if diff[i] * diff[i + 1] < 0:
            x = diff[i] / (diff[i] - diff[i + 1])
            return float(w[i] + x * (w[i + 1] - w[i]))
    return None


def load_sweep(base: dict, waists_m, modes=("diabatic",)):
    """Exact and analytic loading quantities along a waist sweep, per loading mode."""
    cols = {"w0_m": list(waists_m)}
    sp = _species(base.get("species", "Cs"))
    for mode in modes:
        keys = ("N_f", "T_f_K", "D_f", "eta_V", "t_load_s", "t_load_adiabatic_s", "N_d0",
                "N_d0_waist", "two_body_fraction", "three_body_fraction", "majorana_fraction",
                "D_f_analytic", "T_f_analytic_K", "N_f_analytic")
        acc = {k: [] for k in keys}
        for w in waists_m:
            tree = copy.deepcopy(base)
            tree.pop("evap", None)
            tree["dimple"]["w0"] = float(w)
            tree["loading"] = {"mode": mode}
            cfg = ScenarioConfig.from_dict(tree)
            rep = run_load(cfg.load, sp)
            r = rep.result
            eta_d = r.eta_d
            an = dimple_analytic(cfg.load.N, cfg.load.T, eta_d, r.eta_V) if r.eta_V < 1 else None
            vals = dict(N_f=r.transferred_atoms, T_f_K=r.final_temperature, D_f=r.final_psd,
                        eta_V=r.eta_V, t_load_s=rep.t_load, t_load_adiabatic_s=rep.t_load_adiabatic,
                        N_d0=rep.N_d0, N_d0_waist=rep.N_d0_waist,
                        two_body_fraction=rep.losses.two_body_fraction if rep.losses else None,
                        three_body_fraction=rep.losses.three_body_fraction if rep.losses else None,
                        majorana_fraction=rep.losses.majorana_fraction if rep.losses else None,
                        D_f_analytic=an.D_ratio * r.initial_psd if an else None,
                        T_f_analytic_K=an.T_f if an else None,
                        N_f_analytic=an.N_ratio * cfg.load.N if an else None)
            for k in keys:
                acc[k].append(vals[k])
        suffix = "" if len(modes) == 1 else f"_{mode}"
        for k in keys:
            cols[k + suffix] = acc[k]
    return cols


@dataclass
class Check:
    name: str
    value: Any
    target: str
    passed: bool

    def line(self):
        v = _fmt(self.value) if not isinstance(self.value, str) else self.value
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {v}  (target {self.target})"


def _in(x, lo, hi):
    return x is not None and lo <= x <= hi


def _figure_load(fig, outdir):
    from .presets import LOAD_SWEEP_WAISTS_UM, get_preset
    base = get_preset("fig2-cs-load")
    waists = [w * 1e-6 for w in LOAD_SWEEP_WAISTS_UM]
    checks = []
    if fig == "fig2":
        cols = load_sweep(base, waists, modes=("diabatic", "adiabatic"))
        names = ["w0_m"] + [f"{k}_{m}" for m in ("diabatic", "adiabatic")
                            for k in ("N_f", "T_f_K", "D_f", "D_f_analytic", "T_f_analytic_K")]
        files = {"fig2.csv": format_csv(cols, names)}
        i = LOAD_SWEEP_WAISTS_UM.index(100)
        U0 = energy_si(base["dimple"]["U0"])
        eta_f = U0 / (k_B * cols["T_f_K_diabatic"][i])
        checks += [
            Check("final eta at w0 = 100 um", eta_f, "[7, 9]", _in(eta_f, 7, 9)),
            Check("N_f at w0 = 100 um", cols["N_f_diabatic"][i], ">= 5e7",
                  cols["N_f_diabatic"][i] >= 5e7),
            Check("D_f at w0 = 100 um", cols["D_f_diabatic"][i], "[1/1400, 1/350]",
                  _in(cols["D_f_diabatic"][i], 1 / 1400, 1 / 350)),
            Check("D_f decreasing in w0", "yes" if np.all(np.diff(cols["D_f_diabatic"]) < 0) else "no",
                  "yes", bool(np.all(np.diff(cols["D_f_diabatic"]) < 0))),
            Check("adiabatic T_f below diabatic at 40 um", cols["T_f_K_adiabatic"][0],
                  f"< {_fmt(cols['T_f_K_diabatic'][0])}",
                  cols["T_f_K_adiabatic"][0] < cols["T_f_K_diabatic"][0]),
        ]
    else:
        cols = load_sweep(base, waists)
        if fig == "fig5":
            names = ["w0_m", "t_load_s", "t_load_adiabatic_s", "N_f", "N_d0"]
        else:
            names = ["w0_m", "N_f", "N_d0", "N_d0_waist", "two_body_fraction",
                     "three_body_fraction", "majorana_fraction"]
        files = {f"{fig}.csv": format_csv(cols, names)}
        wc = crossing_waist(waists, cols["N_f"], cols["N_d0"])
        checks.append(Check("N_f = N_d0 crossing waist (m)", wc, "[100e-6, 170e-6]",
                            _in(wc, 100e-6, 170e-6)))
    return files, checks


def _figure_evap(fig, outdir):
    from .presets import FIGURES, get_preset
    files, runs, checks = {}, {}, []
    for name in FIGURES[fig]:
        s = run_scenario(get_preset(name))
        runs[name] = s
        files[f"{name}.csv"] = format_csv(trajectory_columns(s.trajectory))
        files[f"{name}.summary.json"] = s.to_json() + "\n"

    def bec(name):
        return runs[name].evap["status"] == BEC_REACHED

    if fig == "fig8":
        e = runs["fig8-rb-neither"].evap
        checks += [
            Check("no gravity, no TBR: t_bec (s)", e["t_bec_s"], "BEC within 5 s",
                  bec("fig8-rb-neither") and e["t_bec_s"] <= 5),
            Check("full model, N0 = 6.7e5: D_max", runs["fig8-rb-full"].evap["D_max"],
                  "< 1 (no BEC)", not bec("fig8-rb-full")),
            Check("full model, N0 = 2e6, T0 = 75 uK: D_max",
                  runs["fig8-rb-experimental"].evap["D_max"], ">= 1 (BEC)",
                  bec("fig8-rb-experimental")),
        ]
    elif fig == "fig9":
        e = runs["fig9-cs-etaramp"].evap
        checks += [
            Check("eta held at 9: D_max", runs["fig9-cs-eta9"].evap["D_max"], "< 1 (no BEC)",
                  not bec("fig9-cs-eta9")),
            Check("eta ramp 9 -> 6: t_bec (s)", e["t_bec_s"], "[0.5, 2]",
                  _in(e["t_bec_s"], 0.5, 2.0)),
        ]
    else:
        e = runs["fig10-cs-waistzoom-aramp"].evap
        checks += [
            Check("a ramp: t_bec (s)", e["t_bec_s"], "[0.175, 0.525]", _in(e["t_bec_s"], 0.175, 0.525)),
            Check("a ramp: final N", e["N"], "[1e7, 4e7]", _in(e["N"], 1e7, 4e7)),
            Check("a ramp: final T (K)", e["T_K"], "[7e-6, 28e-6]", _in(e["T_K"], 7e-6, 28e-6)),
            Check("a ramp: waist reduction", e["w0_ratio"], "[2, 4.5]", _in(e["w0_ratio"], 2, 4.5)),
        ]
    return files, checks


def reproduce(figure_id: str, outdir: Optional[str] = None):
    """Write per-curve CSVs and a check report for one figure; returns (paths, checks)."""
    if figure_id in ("fig2", "fig5", "fig6"):
        files, checks = _figure_load(figure_id, outdir)
    elif figure_id in ("fig8", "fig9", "fig10"):
        files, checks = _figure_evap(figure_id, outdir)
    else:
        raise UnknownFigure(figure_id)
    outdir = resolve_outdir(outdir) or "."
    files[f"{figure_id}_check.txt"] = "\n".join(c.line() for c in checks) + "\n"
    paths = []
    for name, text in files.items():
        path = os.path.join(outdir, name)
        _write(path, text)
        paths.append(path)
    return paths, checks
