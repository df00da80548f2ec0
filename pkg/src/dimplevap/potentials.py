"""Radial trapping potentials, optionally tilted by gravity.

A potential is a :class:`PotentialSpec` wrapping one isotropic *shape*
(power law, Gaussian dimple, linear quadrupole, harmonic, or a sum of those)
plus a uniform gravity tilt ``-m g z``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.constants import g as g_earth, k as k_B
from scipy.optimize import brentq, minimize_scalar

from .errors import NoBoundMinimum
from .species import AtomSpecies


@dataclass(frozen=True)
class PowerLaw:
    """U(r) = U' r^(3/delta); ``r_U`` marks the trap edge used for the depth."""

    U_prime: float
    delta: float
    r_U: float = math.inf

    def __post_init__(self):
        if not (self.U_prime > 0 and self.delta > 0 and self.r_U > 0):
            raise ValueError("PowerLaw needs U_prime, delta, r_U > 0")

    def radial(self, r):
        return self.U_prime * np.abs(r) ** (3.0 / self.delta)

    excess = radial

    def length_scale(self):
        return self.r_U if math.isfinite(self.r_U) else None


@dataclass(frozen=True)
class GaussianDimple:
    """U(r) = -U0 exp(-2 r^2 / w0^2)."""

    U0: float
    w0: float

    def __post_init__(self):
        if not (self.U0 > 0 and self.w0 > 0):
            raise ValueError("GaussianDimple needs U0, w0 > 0")

    def radial(self, r):
        return -self.U0 * np.exp(-2.0 * np.square(r) / self.w0**2)

    def excess(self, r):
        return -self.U0 * np.expm1(-2.0 * np.square(r) / self.w0**2)

    def length_scale(self):
        return self.w0


@dataclass(frozen=True)
class Quadrupole:
    """Linear trap U(r) = mu B' r, given by ``gradient_energy`` = mu B' in J/m."""

    gradient_energy: float

    def __post_init__(self):
        if not self.gradient_energy > 0:
            raise ValueError("Quadrupole needs gradient_energy > 0")

    def radial(self, r):
        return self.gradient_energy * np.abs(r)

    excess = radial

    def length_scale(self):
        return None


@dataclass(frozen=True)
class Harmonic:
    omega: float
    mass: float
    r_U: float = math.inf

    def __post_init__(self):
        if not (self.omega > 0 and self.mass > 0 and self.r_U > 0):
            raise ValueError("Harmonic needs omega, mass, r_U > 0")

    @property
    def U_prime(self):
        return 0.5 * self.mass * self.omega**2

    def radial(self, r):
        return self.U_prime * np.square(r)

    excess = radial

    def length_scale(self):
        return self.r_U if math.isfinite(self.r_U) else None


@dataclass(frozen=True)
class Sum:
    members: Tuple["Shape", ...]

    def __init__(self, *members):
        if len(members) == 1 and isinstance(members[0], (list, tuple)):
            members = tuple(members[0])
        if not members:
            raise ValueError("Sum needs at least one member")
        object.__setattr__(self, "members", tuple(members))

    def radial(self, r):
        return sum(m.radial(r) for m in self.members)

    def excess(self, r):
        return sum(m.excess(r) for m in self.members)

    def length_scale(self):
        scales = [m.length_scale() for m in self.members]
        scales = [s for s in scales if s is not None]
        return max(scales) if scales else None


Shape = Union[PowerLaw, GaussianDimple, Quadrupole, Harmonic, Sum]


@dataclass(frozen=True)
class PotentialSpec:
    shape: Shape
    gravity: float = 0.0
    mass: float = 0.0

    def __post_init__(self):
        if self.gravity != 0 and not self.mass > 0:
            raise ValueError("a mass is needed to apply the gravity tilt")

    def radial(self, r):
        """Isotropic part U(r), no gravity."""
        return self.shape.radial(r)

    def excess(self, r):
        """U(r) - U(0) without cancellation error."""
        return self.shape.excess(r)

    def __add__(self, other: "PotentialSpec") -> "PotentialSpec":
        return PotentialSpec(Sum(self.shape, other.shape), gravity=max(self.gravity, other.gravity),
                             mass=max(self.mass, other.mass))


def potential_value(spec: PotentialSpec, rho, z):
    """U(sqrt(rho^2 + z^2)) - m g z."""
    r = np.hypot(rho, z)
    return spec.shape.radial(r) - spec.mass * spec.gravity * np.asarray(z)


@dataclass(frozen=True)
class TrapGeometry:
    depth: float
    minimum_energy: float
    minimum_position: float
    r_U: float
    omega_eff: float


def _edge_radius(shape):
    """Finite trap edge r_U for power-law shapes, else None."""
    if isinstance(shape, (PowerLaw, Harmonic)) and math.isfinite(shape.r_U):
        return shape.r_U
    if isinstance(shape, Sum):
        edges = [_edge_radius(m) for m in shape.members]
        edges = [e for e in edges if e is not None]
        return min(edges) if edges else None
    return None


def analyze_trap(spec: PotentialSpec, species: AtomSpecies, n_scan: int = 4001) -> TrapGeometry:
    """Locate the vertical minimum of the potential and measure its depth and curvature.

    The depth follows the tilted-trap convention: U_g(r_U, z=r_U) - U_g^- for
    power-law shapes with a finite edge, otherwise the height of the escape
    barrier on the z > 0 side.
    """
    m = species.mass
    g = spec.gravity

    def f(z):
        return spec.shape.radial(abs(z)) - m * g * z

    scale = spec.shape.length_scale()
    if scale is None:
        # unbounded shapes: the gravity sag sets the scale
        scale = 1e-3
    edge = _edge_radius(spec.shape)

    zmax = 10.0 * scale
    zs = np.linspace(-zmax, zmax, n_scan)
    fs = spec.shape.radial(np.abs(zs)) - m * g * zs
    i = int(np.argmin(fs))
    if i == 0 or i == n_scan - 1:
        raise NoBoundMinimum("potential has no minimum within the scan range")
    if fs[i] == fs[i - 1] == fs[i + 1]:
        z_min = zs[i]
    else:
        res = minimize_scalar(f, bracket=(zs[i - 1], zs[i], zs[i + 1]), method="golden",
                              tol=1e-9)
        z_min = float(res.x)
    if g == 0 and abs(z_min) < 1e-6 * scale:
        z_min = 0.0
    f_min = f(z_min)

    if edge is not None:
        r_U = edge
        depth = f(edge) - f_min
    else:
        zz = np.linspace(z_min, zmax, n_scan)
        ff = spec.shape.radial(np.abs(zz)) - m * g * zz
        j = int(np.argmax(ff))
        if j == n_scan - 1:
            grows = ff[-1] > ff[-2]
            if grows and not isinstance(spec.shape, GaussianDimple):
                r_U, depth = math.inf, math.inf
            else:
                r_U, depth = math.inf, float(ff[-1] - f_min)
        elif j == 0:
            depth, r_U = 0.0, z_min
        else:
            res = minimize_scalar(lambda z: -f(z), bracket=(zz[j - 1], zz[j], zz[j + 1]),
                                  method="golden", tol=1e-9)
            r_U = float(res.x)
            depth = f(r_U) - f_min
    if not depth > 0:
        raise NoBoundMinimum(f"gravity overwhelms the trap (depth = {depth:.3e} J)")

    h = 1e-4 * scale
    curv = (f(z_min + h) - 2 * f_min + f(z_min - h)) / h**2
    omega_eff = math.sqrt(curv / m) if curv > 0 else 0.0
    return TrapGeometry(depth=float(depth), minimum_energy=float(f_min),
                        minimum_position=float(z_min), r_U=float(r_U), omega_eff=omega_eff)


CROSSED_FACTOR = 2.0 ** (1.0 / 3.0)


def dimple_frequency_with_gravity(depth: float, w0: float, mass: float, g: float = g_earth,
                                  crossed: bool = False) -> float:
    """Trap frequency of a Gaussian dimple of depth ``depth`` (= eta k_B T) under gravity.

    Reduces to sqrt(4 U0 / (m w0^2)) for g = 0. ``crossed=True`` applies the
    2^(1/3) correction of two identical orthogonal beams to U0.
    """
    omega = math.sqrt(4.0 * depth / (mass * w0**2))
    omega *= 0.5 + 0.5 * math.sqrt(1.0 + math.sqrt(2.0) * mass * w0 * g / depth)
    if crossed:
        omega *= math.sqrt(CROSSED_FACTOR)
    return omega


def waist_for_frequency(omega: float, depth: float, mass: float, g: float = g_earth,
                        crossed: bool = False) -> float:
    """Inverse of :func:`dimple_frequency_with_gravity` in the waist."""
    if crossed:
        omega = omega / math.sqrt(CROSSED_FACTOR)
    r_U = g / omega**2 + math.sqrt(2.0 * depth / mass) / omega
    return math.sqrt(2.0) * r_U


def gravity_parameter(depth: float, omega: float, mass: float, T: float, g: float) -> float:
    """alpha_g = m g r_U / k_B T for a harmonic trap of depth ``depth``."""
    if g == 0:
        return 0.0
    r_U = g / omega**2 + math.sqrt(2.0 * depth / (mass * omega**2))
    return mass * g * r_U / (k_B * T)


def dimple_radius(spec: PotentialSpec, r_hi: float | None = None) -> float:
    """Radius where the combined reservoir + dimple potential crosses zero."""
    if spec.radial(0.0) >= 0:
        raise NoBoundMinimum("potential is not negative at the centre")
    scale = spec.shape.length_scale() or 1e-4
    hi = r_hi or scale
    while spec.radial(hi) < 0:
        hi *= 2
        if hi > 1e3:
            raise NoBoundMinimum("potential never crosses zero")
    return brentq(lambda r: float(spec.radial(r)), 0.0, hi, xtol=1e-15, rtol=1e-13)
