"""Coupled atom-number / energy equations of forced evaporation in a harmonic dimple."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.constants import g as g_earth, hbar, k as k_B
from scipy.integrate import solve_ivp

from ..errors import InvalidEta, NonPhysical, StepFailure
from ..potentials import dimple_frequency_with_gravity, gravity_parameter, waist_for_frequency
from ..species import AtomSpecies
from . import rates as R
from .schedule import CONSTANT_OMEGA, CONSTANT_WAIST, ControlSchedule

LEVITATED_G = 0.01
HARMONIC_DELTA = 1.5

BEC_REACHED = "BEC_REACHED"
TIMEOUT = "TIMEOUT"
STALLED = "STALLED"

ADIABATIC_RATIO = 0.1
ADIABATIC_FRACTION = 0.9


@dataclass(frozen=True)
class TrapControls:
    """Instantaneous trap and collision parameters."""

    eta: float
    omega: float
    w0: float
    a: float
    delta: float = HARMONIC_DELTA
    g_eff: float = 0.0
    gamma_bg: float = 0.0
    gamma_laser_ref: float = 0.0
    laser_ref_depth: float = 0.0
    k2: float = 0.0
    gamma_pot: float = 0.0
    include_tbr: bool = True

    def __post_init__(self):
        if not (self.delta > 0 and self.omega > 0):
            raise ValueError("delta and omega must be positive")


@dataclass(frozen=True)
class EvapState:
    N: float
    E: float
    delta: float = HARMONIC_DELTA

    @classmethod
    def from_temperature(cls, N, T, delta=HARMONIC_DELTA):
        return cls(N, (1.5 + delta) * N * k_B * T, delta)

    @property
    def T(self):
        return self.E / ((1.5 + self.delta) * self.N * k_B)


@dataclass(frozen=True)
class RateSet:
    n0: float
    D: float
    sigma: float
    Gamma_el: float
    p_coll: float
    f_hydro: float
    alpha_g: float
    Gamma_ev: float
    E_ev_per_NkT: float
    Gamma_3: float
    T_h: float
    f_TBR: float
    tbr_heat: float
    Gamma_loss: float
    Gamma_laser: float


def harmonic_peak_density(N, T, omega, m):
    return N * (m * omega**2 / (2 * math.pi * k_B * T)) ** 1.5


def harmonic_psd(N, T, omega):
    return N * (hbar * omega / (k_B * T)) ** 3


def rate_set(N, T, c: TrapControls, species: AtomSpecies) -> RateSet:
    m = species.mass
    a = abs(c.a)
    n0 = harmonic_peak_density(N, T, c.omega, m)
    D = harmonic_psd(N, T, c.omega)
    sigma = R.cross_section(a, T, c.eta, m)
    G_el = R.elastic_rate(n0, sigma, T, m)
    p_coll = R.collision_probability(G_el, c.omega)
    f = R.hydro_smoothing(p_coll)
    depth = c.eta * k_B * T
    alpha_g = gravity_parameter(depth, c.omega, m, T, c.g_eff)
    G_ev, e_ev = R.evaporation_rate_and_energy(G_el, c.eta, c.delta, alpha_g)
    if c.include_tbr:
        tb = R.tbr_terms(a, T, n0, c.eta, c.delta, m, p_coll)
        G3, T_h, f_tbr, heat = tb.Gamma_3, tb.T_h, tb.f_TBR, tb.heat_per_event
    else:
        G3, T_h, f_tbr, heat = 0.0, R.binding_temperature(a, m) if a else math.inf, 1.0, 0.0
    G_loss = c.gamma_bg + c.k2 * n0 * 2.0**-c.delta
    G_laser = 0.0
    if c.gamma_laser_ref and c.laser_ref_depth:
        G_laser = c.gamma_laser_ref * depth / c.laser_ref_depth
    return RateSet(n0=n0, D=D, sigma=sigma, Gamma_el=G_el, p_coll=p_coll, f_hydro=f,
                   alpha_g=alpha_g, Gamma_ev=G_ev, E_ev_per_NkT=e_ev, Gamma_3=G3, T_h=T_h,
                   f_TBR=f_tbr, tbr_heat=heat, Gamma_loss=G_loss, Gamma_laser=G_laser)


def _free_terms(N, T, c, species, rs: RateSet):
    """Ndot/N and the part of Edot that does not involve the trap reshaping."""
    kT = k_B * T
    E = (1.5 + c.delta) * N * kT
    evap = rs.Gamma_ev * rs.f_hydro
    ndot_n = -(evap + rs.Gamma_loss + rs.Gamma_3)
    A = (-(rs.Gamma_loss + rs.Gamma_3) * E
         - rs.E_ev_per_NkT * N * kT * evap
         + N * (rs.Gamma_laser * k_B * species.recoil_temperature + rs.Gamma_3 * rs.tbr_heat))
    return ndot_n, A, E


def evap_rhs(state: EvapState, controls: TrapControls, species: AtomSpecies):
    """(dN/dt, dE/dt) with the trap-reshaping rate taken from ``controls.gamma_pot``."""
    N, T = state.N, state.T
    rs = rate_set(N, T, controls, species)
    ndot_n, A, _ = _free_terms(N, T, controls, species, rs)
    E_pot = controls.delta * N * k_B * T
    return ndot_n * N, A + E_pot * controls.gamma_pot


@dataclass(frozen=True)
class PsdRate:
    dD_over_D: float
    gamma: float
    eta_optimum: float
    gamma_el_over_3omega: float
    tbr_limit_ratio: float
    tbr_heating_multiplier: float


def psd_rate(state: EvapState, controls: TrapControls, species: AtomSpecies) -> PsdRate:
    """Zero-gravity phase-space-density growth rate and strategy diagnostics."""
    N, T = state.N, state.T
    c = replace(controls, g_eff=0.0)
    rs = rate_set(N, T, c, species)
    d = c.delta
    gain = (rs.Gamma_el / math.sqrt(2) * math.exp(-c.eta) * (c.eta - 2.5 - d)
            * (c.eta - 1.5 - d) * rs.f_hydro)
    mult = (5.0 / 3.0 * d * T + _th_f(rs)) / T
    dd = (gain - rs.Gamma_loss - rs.Gamma_laser * species.recoil_temperature / T
          - rs.Gamma_3 * mult)
    ndot_n = -(rs.Gamma_ev * rs.f_hydro + rs.Gamma_loss + rs.Gamma_3)
    gamma = dd / ndot_n if ndot_n != 0 else math.inf
    return PsdRate(dD_over_D=dd, gamma=gamma, eta_optimum=4.1 + d,
                   gamma_el_over_3omega=rs.Gamma_el / (3 * c.omega),
                   tbr_limit_ratio=rs.Gamma_el / (300 * T * 1e6),
                   tbr_heating_multiplier=mult)


def _th_f(rs):
    if rs.f_TBR == 0 or math.isinf(rs.T_h):
        return 0.0 if rs.f_TBR == 0 else math.inf
    return rs.T_h * rs.f_TBR


def loss_free_psd_gain(eta, delta, Gamma_el=1.0):
    """First term of the PSD growth rate with f = 1 and no losses."""
    return Gamma_el / math.sqrt(2) * math.exp(-eta) * (eta - 2.5 - delta) * (eta - 1.5 - delta)


def optimal_eta(delta, lo=None, hi=20.0, n=200001):
    """Scan eta for the maximum of the loss-free PSD growth rate."""
    lo = 2.5 + delta if lo is None else lo
    etas = np.linspace(lo, hi, n)
    vals = np.exp(-etas) * (etas - 2.5 - delta) * (etas - 1.5 - delta)
    return float(etas[int(np.argmax(vals))])


# --------------------------------------------------------------------------
# time integration


@dataclass(frozen=True)
class EvapSetup:
    """Static part of an evaporation run.

    Exactly one of ``w0`` and ``omega0`` fixes the initial trap; the other
    follows from the initial depth eta0 k_B T0 and gravity.
    """

    species: AtomSpecies
    eta0: float
    a0: float
    w0: Optional[float] = None
    omega0: Optional[float] = None
    g_eff: float = g_earth
    gamma_bg: Optional[float] = None
    gamma_laser_ref: Optional[float] = None
    laser_ref_depth: Optional[float] = None
    k2: float = 0.0
    include_tbr: bool = True
    crossed: bool = False

    def background(self):
        return self.species.background_rate if self.gamma_bg is None else self.gamma_bg


@dataclass
class Trajectory:
    t: np.ndarray
    N: np.ndarray
    T: np.ndarray
    D: np.ndarray
    Gamma_el: np.ndarray
    p_coll: np.ndarray
    Gamma3_over_Gammaev: np.ndarray
    alpha_g: np.ndarray
    eta: np.ndarray
    omega: np.ndarray
    a: np.ndarray
    w0: np.ndarray
    gamma: np.ndarray
    dDoverD: np.ndarray
    status: str = TIMEOUT
    t_bec: Optional[float] = None
    adiabatic_fraction: float = 1.0
    max_adiabatic_ratio: float = 0.0
    extras: dict = field(default_factory=dict)

    COLUMNS = ("t", "N", "T", "D", "Gamma_el", "p_coll", "Gamma3_over_Gammaev", "alpha_g",
               "eta", "omega", "a", "w0", "gamma", "dDoverD")

    @property
    def final(self):
        return {name: float(getattr(self, name)[-1]) for name in self.COLUMNS}

    def __len__(self):
        return len(self.t)


class _Dynamics:
    def __init__(self, setup: EvapSetup, schedule: ControlSchedule, T0: float):
        self.setup = setup
        self.schedule = schedule
        self.m = setup.species.mass
        sp = setup.species
        self.gamma_laser_ref = (sp.laser_heating_rate if setup.gamma_laser_ref is None
                                else setup.gamma_laser_ref)
        self.laser_ref_depth = (sp.laser_reference_depth if setup.laser_ref_depth is None
                                else setup.laser_ref_depth)
        depth0 = setup.eta0 * k_B * T0
        g = setup.g_eff
        if schedule.waist_policy == CONSTANT_WAIST:
            if setup.w0 is None:
                self.w0 = waist_for_frequency(setup.omega0, depth0, self.m, g, setup.crossed)
            else:
                self.w0 = setup.w0
        else:
            if setup.omega0 is None:
                self.omega0 = dimple_frequency_with_gravity(depth0, setup.w0, self.m, g,
                                                            setup.crossed)
            else:
                self.omega0 = setup.omega0

    def controls(self, t, T):
        s, sch = self.setup, self.schedule
        eta = sch.value("eta", t, s.eta0)
        a = sch.value("a", t, s.a0)
        depth = eta * k_B * T
        g = s.g_eff
        if sch.waist_policy == CONSTANT_WAIST:
            w0 = self.w0
            omega = dimple_frequency_with_gravity(depth, w0, self.m, g, s.crossed)
            x = math.sqrt(2) * self.m * w0 * g / depth
            h = 0.5 + 0.5 * math.sqrt(1 + x)
            dln = 0.5 - x / (4 * math.sqrt(1 + x) * h)  # d ln(omega)/d ln(depth)
        else:
            omega = self.omega0
            w0 = waist_for_frequency(omega, depth, self.m, g, s.crossed)
            sq = math.sqrt(2 * depth / self.m) / omega
            dln = 0.5 * sq / (g / omega**2 + sq)  # d ln(w0)/d ln(depth)
        c = TrapControls(eta=eta, omega=omega, w0=w0, a=a, g_eff=g, gamma_bg=s.background(),
                         gamma_laser_ref=self.gamma_laser_ref,
                         laser_ref_depth=self.laser_ref_depth, k2=s.k2,
                         include_tbr=s.include_tbr)
        return c, dln

    def evaluate(self, t, N, T):
        """State derivatives at one instant, together with the controls that produce them."""
        c, dln = self.controls(t, T)
        if not c.eta > 2.5 + c.delta:
            raise InvalidEta(f"eta = {c.eta:.4g} at t = {t:.4g} s is below 5/2 + delta")
        rs = rate_set(N, T, c, self.setup.species)
        ndot_n, A, E = _free_terms(N, T, c, self.setup.species, rs)
        eta_rate = self.schedule.rate("eta", t) / c.eta
        b = c.delta / (1.5 + c.delta)
        if self.schedule.waist_policy == CONSTANT_WAIST:
            # Gamma_pot = 2 dln(omega) depends on Tdot through the depth eta k_B T
            tdot_t = (A / E - ndot_n + 2 * b * dln * eta_rate) / (1 - 2 * b * dln)
            gamma_pot = 2 * dln * (eta_rate + tdot_t)
            u0_rate = gamma_pot
        else:
            tdot_t = A / E - ndot_n
            gamma_pot = 0.0
            u0_rate = 2 * dln * (eta_rate + tdot_t)
        dd = ndot_n - (1.5 + c.delta) * tdot_t + c.delta * gamma_pot
        return c, rs, ndot_n, tdot_t, gamma_pot, u0_rate, dd

    def rhs(self, t, y):
        N, E = math.exp(y[0]), math.exp(y[1])
        T = E / ((1.5 + HARMONIC_DELTA) * N * k_B)
        _, _, ndot_n, tdot_t, *_ = self.evaluate(t, N, T)
        return [ndot_n, ndot_n + tdot_t]


def integrate(initial: EvapState, schedule: ControlSchedule, t_end: float, setup: EvapSetup,
              rtol: float = 1e-8, max_step: Optional[float] = None,
              stop_at_bec: bool = True) -> Trajectory:
    """Integrate the evaporation equations from ``initial`` up to ``t_end``.

    Uses an adaptive Dormand-Prince 5(4) pair on (ln N, ln E). Stops at the
    first D = 1 crossing when ``stop_at_bec`` is set.
    """
    if initial.delta != HARMONIC_DELTA:
        raise ValueError("time integration supports the harmonic dimple (delta = 3/2) only")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    dyn = _Dynamics(setup, schedule, initial.T)
    kc = (1.5 + HARMONIC_DELTA) * k_B

    def psd_event(t, y):
        N, E = math.exp(y[0]), math.exp(y[1])
        T = E / (kc * N)
        c, _ = dyn.controls(t, T)
        return math.log(harmonic_psd(N, T, c.omega))

    psd_event.terminal = stop_at_bec
    psd_event.direction = 1

    def floor_event(t, y):
        N, E = math.exp(y[0]), math.exp(y[1])
        return min(y[0], math.log(E / (kc * N) / 1e-9))

    floor_event.terminal = True
    floor_event.direction = -1

    y0 = [math.log(initial.N), math.log(initial.E)]
    sol = solve_ivp(dyn.rhs, (0.0, t_end), y0, method="RK45", rtol=rtol, atol=rtol * 1e-2,
                    max_step=max_step or t_end / 400, events=[psd_event, floor_event])
    if sol.status == -1:
        raise StepFailure(sol.message)
    if sol.t_events[1].size:
        raise NonPhysical(f"N or T reached its floor at t = {sol.t_events[1][0]:.4g} s")

    ts = sol.t
    ys = sol.y
    t_bec = None
    if sol.t_events[0].size:
        t_bec = float(sol.t_events[0][0])
        if ts[-1] < t_bec:
            ts = np.append(ts, t_bec)
            ys = np.column_stack([ys, sol.y_events[0][0]])
    traj = _record(dyn, ts, ys)
    if t_bec is not None:
        traj.status, traj.t_bec = BEC_REACHED, t_bec
    else:
        traj.status = STALLED if traj.dDoverD[-1] <= 0 else TIMEOUT
    return traj


def _record(dyn: _Dynamics, ts, ys) -> Trajectory:
    cols = {name: np.empty(len(ts)) for name in Trajectory.COLUMNS}
    ratios = np.empty(len(ts))
    kc = (1.5 + HARMONIC_DELTA) * k_B
    for i, t in enumerate(ts):
        N, E = math.exp(ys[0, i]), math.exp(ys[1, i])
        T = E / (kc * N)
        c, rs, ndot_n, tdot_t, gamma_pot, u0_rate, dd = dyn.evaluate(t, N, T)
        cols["t"][i] = t
        cols["N"][i] = N
        cols["T"][i] = T
        cols["D"][i] = rs.D
        cols["Gamma_el"][i] = rs.Gamma_el
        cols["p_coll"][i] = rs.p_coll
        cols["Gamma3_over_Gammaev"][i] = _ratio(rs.Gamma_3, rs.Gamma_ev)
        cols["alpha_g"][i] = rs.alpha_g
        cols["eta"][i] = c.eta
        cols["omega"][i] = c.omega
        cols["a"][i] = c.a
        cols["w0"][i] = c.w0
        cols["dDoverD"][i] = dd
        cols["gamma"][i] = dd / ndot_n if ndot_n != 0 else math.inf
        ratios[i] = max(_ratio(abs(u0_rate), rs.Gamma_el),
                        abs(gamma_pot) / (c.omega / (2 * math.pi)))
    traj = Trajectory(**cols)
    traj.adiabatic_fraction = adiabatic_time_fraction(traj.t, ratios)
    traj.max_adiabatic_ratio = float(ratios.max())
    traj.extras["adiabatic_ratio"] = ratios
    return traj


def _ratio(x, y):
    # x / y with 0 / 0 = 0 for collisionless samples
    if y == 0:
        return 0.0 if x == 0 else math.inf
    return x / y


def adiabatic_time_fraction(t, ratios, limit=ADIABATIC_RATIO):
    """Fraction of elapsed time during which both adiabaticity ratios stay below ``limit``."""
    t = np.asarray(t)
    if len(t) < 2 or t[-1] == t[0]:
        return 1.0 if (len(ratios) == 0 or ratios[0] <= limit) else 0.0
    ok = (np.asarray(ratios) <= limit).astype(float)
    mid = 0.5 * (ok[1:] + ok[:-1])
    return float(np.sum(mid * np.diff(t)) / (t[-1] - t[0]))
