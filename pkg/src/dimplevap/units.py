"""Conversion of suffixed config strings ("150 uK", "10 mT/cm", "100 a0") to SI floats."""
from __future__ import annotations

import math
from functools import lru_cache

import pint
from scipy.constants import k as k_B

from .errors import ConfigError


@lru_cache(maxsize=1)
def _registry():
    return pint.UnitRegistry()


def to_si(value, unit: str) -> float:
    """Return ``value`` in the SI unit ``unit``.

    Bare numbers are taken to be SI already; strings carry their own unit and
    must be dimensionally compatible with ``unit``.
    """
    if isinstance(value, bool):
        raise ConfigError(f"expected a quantity in {unit}, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a number or a string with units, got {value!r}")
    ureg = _registry()
    try:
        q = ureg.Quantity(value.replace("µ", "u"))
        return float(q.to(unit).magnitude)
    except (pint.errors.PintError, ValueError, AttributeError) as exc:
        raise ConfigError(f"cannot read {value!r} as {unit}: {exc}") from exc


def energy_si(value) -> float:
    """Energy in J; a temperature such as "1720 uK" is read as k_B T."""
    if isinstance(value, str):
        ureg = _registry()
        try:
            q = ureg.Quantity(value.replace("µ", "u"))
        except (pint.errors.PintError, ValueError) as exc:
            raise ConfigError(f"cannot read {value!r} as an energy: {exc}") from exc
        if q.check("[temperature]"):
            return k_B * float(q.to("K").magnitude)
    return to_si(value, "J")


def angular_frequency_si(value) -> float:
    """rad/s; "1500 Hz" is read as a cyclic frequency and multiplied by 2 pi."""
    if isinstance(value, str) and "rad" not in value:
        return 2 * math.pi * to_si(value, "Hz")
    return to_si(value, "rad/s")
