"""Named scenarios reproducing the published figures.

Every preset is a plain config tree (see :mod:`dimplevap.scenario`); values
with units are strings so the presets double as config-file examples.
"""
from __future__ import annotations

import copy
import math

from scipy.constants import k as k_B

from .errors import ConfigError
from .potentials import waist_for_frequency
from .species import RUBIDIUM87

# Cs reservoir of the trapping-potential figure: 10^9 atoms at 150 uK in a
# 10 mT/cm quadrupole, loaded into a crossed Nd:YAG dimple of depth 1720 uK
CS_LOAD = {
    "name": "fig2-cs-load",
    "species": "Cs",
    "reservoir": {"trap": {"kind": "quadrupole", "gradient": "10 mT/cm"},
                  "N": 1e9, "T": "150 uK"},
    "dimple": {"w0": "100 um", "U0": "1720 uK"},
    "loading": {"mode": "diabatic"},
}

# Rb check against the scaling-law experiment: 6.7e5 atoms at 38 uK, a
# 2 pi x 1500 Hz trap held at eta = 10, 6 s lifetime. The waist is fixed
# from the initial trap frequency and then kept constant.
RB_T0 = 38e-6
RB_W0 = waist_for_frequency(2 * math.pi * 1500.0, 10 * k_B * RB_T0, RUBIDIUM87.mass)
RB_BASE = {
    "name": "fig8-rb-full",
    "species": "Rb87",
    "evap": {
        "N0": 6.7e5, "T0": "38 uK", "eta0": 10, "a0": "100 a0", "w0": RB_W0,
        "gravity": True, "tbr": True, "lifetime": "6 s",
        "t_end": "6 s",
        "schedule": {"waist_policy": "constant_waist"},
    },
}

# Cs evaporation starting from the loaded dimple: 1e8 atoms at 200 uK,
# eta = 9, 100 um waist, 3 s background lifetime
CS_EVAP = {
    "name": "fig9-cs-eta9",
    "species": "Cs",
    "evap": {
        "N0": 1e8, "T0": "200 uK", "eta0": 9, "a0": "100 a0", "w0": "100 um",
        "levitation": True, "tbr": True, "t_end": "3 s",
        "schedule": {"waist_policy": "constant_waist"},
    },
}


def _variant(base, name, **evap):
    cfg = copy.deepcopy(base)
    cfg["name"] = name
    sched = evap.pop("schedule", None)
    cfg["evap"].update(evap)
    if sched is not None:
        cfg["evap"]["schedule"] = sched
    return cfg


_ETA_RAMP = {"kind": "exponential_decay", "v0": 9, "v_inf": 6, "tau": "0.2 s"}
_A_RAMP = {"kind": "exponential_decay", "v0": "30 a0", "v_inf": "10 a0", "tau": "0.2 s"}

PRESETS = {
    "fig2-cs-load": CS_LOAD,
    "fig8-rb-full": RB_BASE,
    "fig8-rb-nogravity": _variant(RB_BASE, "fig8-rb-nogravity", gravity=False),
    "fig8-rb-notbr": _variant(RB_BASE, "fig8-rb-notbr", tbr=False),
    "fig8-rb-neither": _variant(RB_BASE, "fig8-rb-neither", gravity=False, tbr=False),
    # measured starting point of the experiment, same waist
    "fig8-rb-experimental": _variant(RB_BASE, "fig8-rb-experimental", N0=2e6, T0="75 uK",
                                     t_end="8 s"),
    "fig9-cs-eta9": CS_EVAP,
    "fig9-cs-etaramp": _variant(CS_EVAP, "fig9-cs-etaramp",
                                schedule={"waist_policy": "constant_waist", "eta": _ETA_RAMP}),
    "fig10-cs-waistzoom": _variant(CS_EVAP, "fig10-cs-waistzoom",
                                   schedule={"waist_policy": "constant_omega"}),
    "fig10-cs-waistzoom-aramp": _variant(CS_EVAP, "fig10-cs-waistzoom-aramp", a0="30 a0",
                                         schedule={"waist_policy": "constant_omega",
                                                   "a": _A_RAMP}),
}

# figure id -> presets drawn as separate curves
FIGURES = {
    "fig2": ["fig2-cs-load"],
    "fig5": ["fig2-cs-load"],
    "fig6": ["fig2-cs-load"],
    "fig8": ["fig8-rb-full", "fig8-rb-nogravity", "fig8-rb-notbr", "fig8-rb-neither",
             "fig8-rb-experimental"],
    "fig9": ["fig9-cs-eta9", "fig9-cs-etaramp"],
    "fig10": ["fig10-cs-waistzoom", "fig10-cs-waistzoom-aramp"],
}

# waists of the loading sweeps (um)
LOAD_SWEEP_WAISTS_UM = [40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150, 160, 170, 180, 200,
                        225, 250, 275, 300, 350, 400]


def get_preset(name: str) -> dict:
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
