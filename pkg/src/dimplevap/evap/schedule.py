"""Time-dependent control ramps for forced evaporation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Union

CONSTANT_WAIST = "constant_waist"
CONSTANT_OMEGA = "constant_omega"
WAIST_POLICIES = (CONSTANT_WAIST, CONSTANT_OMEGA)
TARGETS = ("eta", "a")


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, t):
        return self.value

    def rate(self, t):
        return 0.0


@dataclass(frozen=True)
class ExponentialDecay:
    """v(t) = v_inf + (v0 - v_inf) exp(-t / tau)."""

    v0: float
    v_inf: float
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    def __call__(self, t):
        return self.v_inf + (self.v0 - self.v_inf) * math.exp(-t / self.tau)

    def rate(self, t):
        return -(self.v0 - self.v_inf) / self.tau * math.exp(-t / self.tau)


Profile = Union[Constant, ExponentialDecay]


@dataclass(frozen=True)
class ControlSchedule:
    """Ramps for eta and the scattering length plus the waist policy.

    Channels that are not given stay at their initial value.
    """

    channels: Dict[str, Profile] = field(default_factory=dict)
    waist_policy: str = CONSTANT_WAIST

    def __post_init__(self):
        for name in self.channels:
            if name not in TARGETS:
                raise ValueError(f"unknown control channel {name!r}")
        if self.waist_policy not in WAIST_POLICIES:
            raise ValueError(f"waist_policy must be one of {WAIST_POLICIES}")

    def value(self, name, t, default):
        prof = self.channels.get(name)
        return default if prof is None else prof(t)

    def rate(self, name, t):
        prof = self.channels.get(name)
        return 0.0 if prof is None else prof.rate(t)


def profile_from_dict(d) -> Profile:
    kind = d.get("kind", "constant")
    if kind == "constant":
        return Constant(float(d["value"]))
    if kind in ("exponential_decay", "exp"):
        return ExponentialDecay(float(d["v0"]), float(d["v_inf"]), float(d["tau"]))
    raise ValueError(f"unknown profile kind {kind!r}")
