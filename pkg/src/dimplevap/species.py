"""Atomic species data.

All values are SI. The two presets cover the cesium reservoir/dimple
scenarios and the rubidium evaporation benchmark.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

from scipy.constants import atomic_mass, k as k_B, physical_constants

a_0 = physical_constants["Bohr radius"][0]
mu_B = physical_constants["Bohr magneton"][0]

K2Model = Callable[[float, float], float]


@dataclass(frozen=True)
class AtomSpecies:
    """Immutable description of one atomic species.

    ``scattering_length`` is signed; every formula uses its magnitude.
    ``k2_model(B, T)`` takes the field in tesla and the temperature in kelvin
    and returns the two-body loss coefficient in m^3/s.
    """

    name: str
    mass: float
    scattering_length: float
    magnetic_moment: float
    recoil_temperature: float = 0.0
    k2_model: Optional[K2Model] = None
    background_rate: float = 0.0
    laser_heating_rate: float = 0.0
    laser_reference_depth: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.recoil_temperature < 0:
            raise ValueError("recoil_temperature must be >= 0")
        if self.background_rate < 0:
            raise ValueError("background_rate must be >= 0")
        if self.laser_heating_rate < 0 or self.laser_reference_depth < 0:
            raise ValueError("laser heating parameters must be >= 0")

    def k2(self, B: float, T: float) -> float:
        if self.k2_model is None:
            return 0.0
        return self.k2_model(B, T)

    def with_(self, **changes) -> "AtomSpecies":
        return replace(self, **changes)


def cesium_k2(B: float, T: float) -> float:
    # 4e-11 * B(mT)^2 * T(uK)^-0.78 cm^3/s, B^2 taken as quoted
    B_mT = abs(B) * 1e3
    T_uK = T * 1e6
    return 4e-11 * B_mT**2 * T_uK ** (-0.78) * 1e-6


# Cs f=3, m_f=-3: mu = 3|mu_B|/4, a = -3000 a0 near zero field,
# 3 s background lifetime, 11 1/s photon heating at full dimple power
# (U0 = k_B * 1720 uK), recoil temperature 0.2 uK.
CESIUM = AtomSpecies(
    name="Cs",
    mass=132.905451933 * atomic_mass,
    scattering_length=-3000 * a_0,
    magnetic_moment=0.75 * mu_B,
    recoil_temperature=0.2e-6,
    k2_model=cesium_k2,
    background_rate=1 / 3.0,
    laser_heating_rate=11.0,
    laser_reference_depth=k_B * 1720e-6,
)

# Rb-87 benchmark: a = 100 a0, 6 s lifetime. No photon heating is modelled.
RUBIDIUM87 = AtomSpecies(
    name="Rb87",
    mass=86.909180527 * atomic_mass,
    scattering_length=100 * a_0,
    magnetic_moment=0.5 * mu_B,
    recoil_temperature=0.362e-6,
    background_rate=1 / 6.0,
)

PRESETS = {"Cs": CESIUM, "Rb87": RUBIDIUM87, "Rb": RUBIDIUM87}


def get_species(name: str) -> AtomSpecies:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown species preset {name!r}; known: {sorted(PRESETS)}") from None
