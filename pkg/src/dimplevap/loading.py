"""Kinetics of dimple filling from a reservoir, including the losses while it fills."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import hbar, k as k_B
from scipy.special import erf

from .errors import InvalidRegime
from .evap.rates import RESERVOIR_ETA, cross_section, elastic_rate, three_body_coefficient
from .potentials import PotentialSpec
from .species import AtomSpecies
from .thermo import DimpleLoadResult, SampleState, thermo_report

# transfer probability into the dimple after one collision and probability of
# evaporating out of it; both are folded into the factor 2 of the loading time
# (P_TRANSFER) or neglected (P_EVAPORATE), and kept only for traceability
P_TRANSFER = 0.5
P_EVAPORATE = 0.15


def escape_probability(eta):
    """Probability that a thermal atom carries more than eta k_B T of kinetic energy."""
    if eta < 0:
        raise ValueError("eta must be >= 0")
    s = math.sqrt(eta)
    return 1.0 + 2.0 * math.exp(-eta) * s / math.sqrt(math.pi) - erf(s)


@dataclass(frozen=True)
class LoadingTimescales:
    t_osc: float
    t_coll: float
    v_i: float
    l: float
    r_d: float

    def __post_init__(self):
        for name in ("t_osc", "t_coll", "v_i", "l", "r_d"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def hydrodynamic(self):
        """True when the reservoir collides faster than it oscillates."""
        return self.t_coll < self.t_osc


def reservoir_cross_section(species: AtomSpecies, T):
    """sigma with the eta = 4 convention of an infinitely deep reservoir."""
    return float(cross_section(species.scattering_length, T, RESERVOIR_ETA, species.mass))


def timescales(reservoir: SampleState, U_magn: PotentialSpec, species: AtomSpecies,
               r_d: float, sigma: float | None = None) -> LoadingTimescales:
    T = reservoir.temperature
    rep = thermo_report(reservoir, U_magn, species)
    l = rep.effective_volume ** (1.0 / 3.0)
    v_i = math.sqrt(k_B * T / species.mass)
    if sigma is None:
        sigma = reservoir_cross_section(species, T)
    gamma = float(elastic_rate(rep.peak_density, sigma, T, species.mass))
    return LoadingTimescales(t_osc=l / v_i, t_coll=1.0 / gamma, v_i=v_i, l=l, r_d=r_d)


def hydrodynamic_threshold(ts: LoadingTimescales, sigma: float) -> float:
    """Dimple atom number N_d0 above which the dimple is opaque to incoming atoms."""
    return 2.0 * ts.t_osc / ts.t_coll * ts.r_d**2 / sigma


def hydrodynamic_density(ts: LoadingTimescales, n_i: float) -> float:
    """Dimple density n_d0 = 2 (l / r_d) n_i at the opacity threshold."""
    return 2.0 * ts.l / ts.r_d * n_i


def hydrodynamic_threshold_waist(w0: float, sigma: float) -> float:
    """Shortcut N_d0 ~ 4 w0^2 / sigma using r_d^2 ~ 2 w0^2."""
    return 4.0 * w0**2 / sigma


def loading_time(N_f: float, N_i: float, N_d0: float, ts: LoadingTimescales) -> float:
    """Time to fill the dimple with N_f atoms.

    Exponential growth of the dimple density up to N_d0, then a linear regime
    limited by the flux through the dimple surface.
    """
    if not (N_f > 0 and N_i > 0 and N_d0 > 0):
        raise ValueError("atom numbers must be positive")
    n_res = N_i / ts.l**3

    def growth(n):
        ratio = (n / ts.r_d**3) / n_res
        if ratio < 1:
            raise InvalidRegime("dimple ends up less dense than the reservoir")
        return 2.0 * ts.t_coll * math.log(ratio)

    if N_f < N_d0:
        return growth(N_f)
    return growth(N_d0) + ts.t_coll * ts.l**2 / ts.r_d**2 * (N_f - N_d0) / N_i


def adiabatic_loading_time(t_load: float) -> float:
    return 3.0 * t_load


@dataclass(frozen=True)
class LossBudget:
    two_body_fraction: float
    three_body_fraction: float
    majorana_fraction: float
    r_maj: float
    total_lost: float


def dimple_rms_radius(U0: float, w0: float, T: float) -> float:
    """sigma_r = sqrt(k_B T / (m omega^2)) with omega^2 = 4 U0 / (m w0^2)."""
    return 0.5 * w0 * math.sqrt(k_B * T / U0)


def majorana_radius(T: float, species: AtomSpecies, gradient_energy: float) -> float:
    v = math.sqrt(k_B * T / species.mass)
    return math.sqrt(hbar * v / gradient_energy)


def loss_budget(load: DimpleLoadResult, ts: LoadingTimescales, species: AtomSpecies,
                B_field: float, gradient_energy: float) -> LossBudget:
    """Fractions of the dimple atoms lost during one reservoir collision time.

    ``B_field`` is the field at the dimple rms radius (where K2 is evaluated),
    ``gradient_energy`` is mu B' of the quadrupole.
    """
    T = load.final_temperature
    n_f, n_i = load.final_peak_density, load.initial_peak_density
    K2 = species.k2(B_field, T) if species.k2_model is not None else 0.0
    L3 = float(three_body_coefficient(species.scattering_length, T, RESERVOIR_ETA, species.mass))
    two = ts.t_coll * K2 * n_f
    three = 2.0 / 3.0 * ts.t_coll * L3 * n_f**2
    r_maj = majorana_radius(T, species, gradient_energy)
    maj = (r_maj / load.dimple_radius) ** 2 * n_f / n_i
    return LossBudget(two_body_fraction=two, three_body_fraction=three, majorana_fraction=maj,
                      r_maj=r_maj, total_lost=load.transferred_atoms * (two + three + maj))
