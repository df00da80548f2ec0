"""Equilibrium thermodynamics of a Boltzmann gas in a radial potential.

Energies returned here are measured from the bottom of the potential,
U(0). Gravity is ignored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DivergentIntegral, NoRoot
from .potentials import PotentialSpec, Sum, dimple_radius
from .species import AtomSpecies

CUTOFF_KT = 40.0
QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class SampleState:
    atom_number: float
    temperature: float

    def __post_init__(self):
        if not (self.atom_number > 0 and self.temperature > 0):
            raise ValueError("atom number and temperature must be positive")


@dataclass(frozen=True)
class ThermoReport:
    partition_function: float
    phase_space_density: float
    peak_density: float
    free_energy: float
    entropy: float
    energy: float
    effective_volume: float
    thermal_wavelength: float


@dataclass(frozen=True)
class DimpleLoadResult:
    final_temperature: float
    transferred_atoms: float
    final_psd: float
    dimple_radius: float
    eta_d: float
    eta_V: float
    dimple_volume: float
    final_peak_density: float
    initial_peak_density: float
    initial_psd: float


def thermal_wavelength(T, mass):
    return np.sqrt(2 * math.pi * hbar**2 / (mass * k_B * T))


def integration_radius(U: PotentialSpec, T: float, r_start: float = 1e-9) -> float:
    """Smallest doubling radius where U(r) - U(0) exceeds 40 k_B T."""
    r = r_start
    while float(U.excess(r)) <= CUTOFF_KT * k_B * T:
        r *= 2
        if r > 1e3:
            raise DivergentIntegral("potential does not confine the gas; Boltzmann integral diverges")
    return r


def _segments(r_max, r_min=None):
    # geometric breakpoints resolve a tight dimple inside a wide reservoir
    r_min = r_min or r_max * 2.0**-30
    pts = [0.0]
    r = r_min
    while r < r_max:
        pts.append(r)
        r *= 2
    pts.append(r_max)
    return pts


def radial_integral(func, r_max, r_min=None):
    """int_0^r_max 4 pi r^2 func(r) dr by segmented adaptive Gauss-Kronrod."""
    total = 0.0
    pts = _segments(r_max, r_min)
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = quad(lambda r: 4 * math.pi * r * r * func(r), a, b,
                      epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
        total += val
    return total


def boltzmann_moments(U: PotentialSpec, T: float):
    """Return (V_e, <U - U(0)>) for the Boltzmann weight exp(-(U - U(0))/k_B T)."""
    kT = k_B * T
    r_max = integration_radius(U, T)
    weight = lambda r: math.exp(-float(U.excess(r)) / kT)
    volume = radial_integral(weight, r_max)
    upot = radial_integral(lambda r: float(U.excess(r)) * weight(r), r_max)
    return volume, upot / volume


def partition_function(U: PotentialSpec, T: float, species: AtomSpecies) -> float:
    volume, _ = boltzmann_moments(U, T)
    return volume / thermal_wavelength(T, species.mass) ** 3


def thermo_report(state: SampleState, U: PotentialSpec, species: AtomSpecies) -> ThermoReport:
    N, T = state.atom_number, state.temperature
    lam = float(thermal_wavelength(T, species.mass))
    volume, mean_u = boltzmann_moments(U, T)
    Z1 = volume / lam**3
    D = N / Z1
    F = N * k_B * T * (math.log(D) - 1)
    # -dF/dT with d ln Z1/dT = 3/(2T) + <U - U(0)>/(k_B T^2)
    S = -N * k_B * (math.log(D) - 1) + N * (1.5 * k_B + mean_u / T)
    E = F + T * S
    n0 = D / lam**3
    return ThermoReport(partition_function=Z1, phase_space_density=D, peak_density=n0,
                        free_energy=F, entropy=S, energy=E, effective_volume=N / n0,
                        thermal_wavelength=lam)


def free_energy(state: SampleState, U: PotentialSpec, species: AtomSpecies) -> float:
    N, T = state.atom_number, state.temperature
    D = N / partition_function(U, T, species)
    return N * k_B * T * (math.log(D) - 1)


def entropy_numeric(state: SampleState, U: PotentialSpec, species: AtomSpecies,
                    rel_step: float = 1e-5) -> float:
    """S = -dF/dT by a centred difference (independent check of the moment route)."""
    N, T = state.atom_number, state.temperature
    h = rel_step * T
    Fp = free_energy(SampleState(N, T + h), U, species)
    Fm = free_energy(SampleState(N, T - h), U, species)
    return -(Fp - Fm) / (2 * h)


def _combined(U_magn: PotentialSpec, U_laser: PotentialSpec) -> PotentialSpec:
    return PotentialSpec(Sum(U_magn.shape, U_laser.shape))


def _solve_temperature(residual, T_i):
    lo, hi = T_i / 100, 100 * T_i
    try:
        return brentq(residual, lo, hi, xtol=1e-14 * T_i, rtol=4 * np.finfo(float).eps,
                      maxiter=200)
    except ValueError as exc:
        raise NoRoot(f"no final temperature in [{lo:.3e}, {hi:.3e}] K") from exc


def _finish_load(N, T_i, T_f, rep_i, U_f, species, has_dimple):
    rep_f = thermo_report(SampleState(N, T_f), U_f, species)
    U_f0 = float(U_f.radial(0.0))
    if has_dimple:
        r_d = dimple_radius(U_f)
        kT = k_B * T_f
        inside = radial_integral(lambda r: math.exp(-float(U_f.excess(r)) / kT), r_d)
        N_f = rep_f.peak_density * inside
    else:
        r_d, N_f = math.inf, N
    V_d = N_f / rep_f.peak_density
    return DimpleLoadResult(
        final_temperature=T_f, transferred_atoms=N_f, final_psd=rep_f.phase_space_density,
        dimple_radius=r_d, eta_d=-U_f0 / (k_B * T_i), eta_V=V_d / rep_i.effective_volume,
        dimple_volume=V_d, final_peak_density=rep_f.peak_density,
        initial_peak_density=rep_i.peak_density, initial_psd=rep_i.phase_space_density)


def _no_laser(U_laser):
    return U_laser is None or float(U_laser.radial(0.0)) == 0.0


def laser_energy_shift(reservoir: SampleState, U_magn: PotentialSpec, U_laser: PotentialSpec,
                       species: AtomSpecies) -> float:
    """int 4 pi r^2 n_i(r) U_laser(r) dr for the reservoir cloud."""
    T = reservoir.temperature
    rep = thermo_report(reservoir, U_magn, species)
    kT = k_B * T
    r_max = integration_radius(U_magn, T)
    return rep.peak_density * radial_integral(
        lambda r: math.exp(-float(U_magn.excess(r)) / kT) * float(U_laser.radial(r)),
        r_max)


def diabatic_load(reservoir: SampleState, U_magn: PotentialSpec, U_laser: PotentialSpec | None,
                  species: AtomSpecies) -> DimpleLoadResult:
    """Sudden switch-on of the dimple: energy conservation fixes T_f."""
    N, T_i = reservoir.atom_number, reservoir.temperature
    rep_i = thermo_report(reservoir, U_magn, species)
    if _no_laser(U_laser):
        return _finish_load(N, T_i, T_i, rep_i, U_magn, species, has_dimple=False)
    U_f = _combined(U_magn, U_laser)
    E_target = rep_i.energy + laser_energy_shift(reservoir, U_magn, U_laser, species)
    U_f0 = float(U_f.radial(0.0))

    def residual(T):
        return thermo_report(SampleState(N, T), U_f, species).energy + N * U_f0 - E_target

    T_f = _solve_temperature(residual, T_i)
    return _finish_load(N, T_i, T_f, rep_i, U_f, species, has_dimple=True)


def adiabatic_load(reservoir: SampleState, U_magn: PotentialSpec, U_laser: PotentialSpec | None,
                   species: AtomSpecies) -> DimpleLoadResult:
    """Slow switch-on of the dimple: entropy conservation fixes T_f."""
    N, T_i = reservoir.atom_number, reservoir.temperature
    rep_i = thermo_report(reservoir, U_magn, species)
    if _no_laser(U_laser):
        return _finish_load(N, T_i, T_i, rep_i, U_magn, species, has_dimple=False)
    U_f = _combined(U_magn, U_laser)
    S_i = rep_i.entropy

    def residual(T):
        return thermo_report(SampleState(N, T), U_f, species).entropy - S_i

    T_f = _solve_temperature(residual, T_i)
    return _finish_load(N, T_i, T_f, rep_i, U_f, species, has_dimple=True)


@dataclass(frozen=True)
class AnalyticLoad:
    T_f: float
    N_ratio: float
    D_ratio: float
    N_ratio_approx: float
    D_ratio_approx: float


def dimple_analytic(N_i: float, T_i: float, eta_d: float, eta_V: float) -> AnalyticLoad:
    """Quadratic + box model of dimple loading, exact and small-parameter forms.

    T_f and N_f/N_i depend on each other; the pair is solved by fixed-point
    iteration on T_f.
    """
    if not (eta_d > 0 and 0 < eta_V < 1):
        raise ValueError("need eta_d > 0 and 0 < eta_V < 1")
    delta = -eta_d * T_i

    def n_ratio(T_f):
        x = eta_V * math.exp(-delta / T_f)
        return x / (1 - eta_V + x)

    T_f = T_i
    for _ in range(500):
        T_new = T_i * (1 + 0.5 * eta_d * eta_V * (1 + n_ratio(T_f)))
        if abs(T_new - T_f) <= 1e-15 * T_i:
            T_f = T_new
            break
        T_f = T_new
    r = n_ratio(T_f)
    D_ratio = r / eta_V * (T_f / T_i) ** 2
    return AnalyticLoad(T_f=T_f, N_ratio=r, D_ratio=D_ratio,
                        N_ratio_approx=eta_V * math.exp(eta_d), D_ratio_approx=math.exp(eta_d))
