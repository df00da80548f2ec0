import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import g as g_earth, k as k_B
from scipy.optimize import brentq

from dimplevap.errors import NoBoundMinimum
from dimplevap.potentials import (GaussianDimple, Harmonic, PotentialSpec, PowerLaw, Quadrupole,
                                  Sum, analyze_trap, dimple_frequency_with_gravity,
                                  dimple_radius, gravity_parameter, potential_value,
                                  waist_for_frequency)
from dimplevap.species import CESIUM, PRESETS, RUBIDIUM87, a_0, cesium_k2, get_species, mu_B

Cs, Rb = CESIUM, RUBIDIUM87
U_FIG1 = k_B * 1720e-6
GRAD = Cs.magnetic_moment * 1.0  # 10 mT/cm


def test_species_presets_valid():
    for sp in PRESETS.values():
        assert sp.mass > 0 and sp.recoil_temperature >= 0 and sp.background_rate >= 0
    assert Cs.scattering_length == pytest.approx(-3000 * a_0)
    assert Cs.magnetic_moment == pytest.approx(0.75 * mu_B)
    assert get_species("Rb") is Rb


def test_species_rejects_bad_fields():
    with pytest.raises(ValueError):
        Cs.with_(mass=-1.0)


@given(B=st.floats(0, 1.0), T=st.floats(1e-9, 1e-3))
def test_cs_k2_nonnegative(B, T):
    assert cesium_k2(B, T) >= 0


def test_cs_k2_value():
    # 4e-11 cm^3/s at 1 mT and 1 uK
    assert cesium_k2(1e-3, 1e-6) == pytest.approx(4e-17)


def test_gaussian_at_origin():
    spec = PotentialSpec(GaussianDimple(U_FIG1, 100e-6))
    assert potential_value(spec, 0.0, 0.0) == -U_FIG1


def test_quadrupole_linear():
    spec = PotentialSpec(Quadrupole(GRAD))
    r = np.array([1e-6, 2e-6, 5e-5])
    assert np.allclose(potential_value(spec, r, 0.0), GRAD * r, rtol=1e-15)


def test_fig1_composite_origin():
    spec = PotentialSpec(Sum(Quadrupole(GRAD), GaussianDimple(U_FIG1, 100e-6)))
    assert potential_value(spec, 0.0, 0.0) == pytest.approx(-U_FIG1, rel=1e-15)


@given(rho=st.floats(0, 1e-3), z=st.floats(-1e-3, 1e-3))
def test_sum_is_sum_of_members(rho, z):
    a, b = Quadrupole(GRAD), GaussianDimple(U_FIG1, 80e-6)
    total = potential_value(PotentialSpec(Sum(a, b), gravity=g_earth, mass=Cs.mass), rho, z)
    parts = (potential_value(PotentialSpec(a), rho, z) + potential_value(PotentialSpec(b), rho, z)
             - Cs.mass * g_earth * z)
    assert total == pytest.approx(parts, rel=1e-12, abs=1e-40)


def test_harmonic_analysis():
    w = 2 * math.pi * 100
    geo = analyze_trap(PotentialSpec(Harmonic(w, Cs.mass, r_U=1e-4)), Cs)
    assert geo.minimum_position == 0.0
    assert geo.omega_eff == pytest.approx(w, rel=1e-6)


def test_gaussian_zero_gravity():
    U0, w0 = U_FIG1, 100e-6
    geo = analyze_trap(PotentialSpec(GaussianDimple(U0, w0)), Cs)
    assert geo.minimum_position == 0.0
    assert geo.depth == pytest.approx(U0, rel=1e-12)
    assert geo.omega_eff == pytest.approx(math.sqrt(4 * U0 / (Cs.mass * w0**2)), rel=1e-6)


def test_gaussian_with_gravity_matches_grid_oracle():
    U0, w0, m = U_FIG1, 100e-6, Cs.mass
    geo = analyze_trap(PotentialSpec(GaussianDimple(U0, w0), gravity=g_earth, mass=m), Cs)
    # dense grid scan over [-3 w0, 3 w0]
    z = np.linspace(-3 * w0, 3 * w0, 100001)
    f = -U0 * np.exp(-2 * z**2 / w0**2) - m * g_earth * z
    i = int(np.argmin(f))
    j = i + int(np.argmax(f[i:]))
    assert geo.depth < U0 and geo.minimum_position > 0
    assert geo.depth == pytest.approx(f[j] - f[i], rel=1e-6)
    assert geo.minimum_position == pytest.approx(z[i], abs=2 * (z[1] - z[0]))


def test_depth_continuous_as_gravity_vanishes():
    U0, w0 = U_FIG1, 100e-6
    depths = [analyze_trap(PotentialSpec(GaussianDimple(U0, w0), gravity=g, mass=Cs.mass), Cs).depth
              for g in (1.0, 1e-2, 1e-4, 1e-6)]
    assert abs(depths[-1] - U0) / U0 < 1e-6
    assert all(np.diff(depths) > 0)


def test_gravity_overwhelms_trap():
    with pytest.raises(NoBoundMinimum):
        analyze_trap(PotentialSpec(GaussianDimple(k_B * 1e-9, 100e-6), gravity=g_earth,
                                   mass=Cs.mass), Cs)


def test_power_law_edge_depth():
    sp = PowerLaw(1e-20, 1.5, r_U=1e-4)
    geo = analyze_trap(PotentialSpec(sp), Cs)
    assert geo.depth == pytest.approx(1e-20 * 1e-8, rel=1e-9)


def test_frequency_zero_gravity_limit():
    d, w0 = 9 * k_B * 200e-6, 100e-6
    assert dimple_frequency_with_gravity(d, w0, Cs.mass, g=0.0) == math.sqrt(4 * d / (Cs.mass * w0**2))


@given(g1=st.floats(0, 20), dg=st.floats(1e-3, 20))
def test_frequency_increases_with_gravity(g1, dg):
    d, w0 = 9 * k_B * 20e-6, 60e-6
    assert (dimple_frequency_with_gravity(d, w0, Cs.mass, g1 + dg)
            > dimple_frequency_with_gravity(d, w0, Cs.mass, g1))


def test_rb_effective_waist():
    w0 = waist_for_frequency(2 * math.pi * 1500, 10 * k_B * 38e-6, Rb.mass, g_earth)
    assert w0 == pytest.approx(40e-6, rel=0.05)
    omega = dimple_frequency_with_gravity(10 * k_B * 38e-6, w0, Rb.mass, g_earth)
    assert omega == pytest.approx(2 * math.pi * 1500, rel=1e-12)


def test_crossed_factor_roundtrip():
    d = 9 * k_B * 200e-6
    om = dimple_frequency_with_gravity(d, 100e-6, Cs.mass, g_earth, crossed=True)
    assert om / dimple_frequency_with_gravity(d, 100e-6, Cs.mass, g_earth) == pytest.approx(2 ** (1 / 6))
    assert waist_for_frequency(om, d, Cs.mass, g_earth, crossed=True) == pytest.approx(100e-6)


def test_cs_frequency_vs_finite_difference():
    # Gaussian whose tilted depth equals eta k_B T; its curvature at the minimum
    d, w0, m = 9 * k_B * 200e-6, 100e-6, Cs.mass

    def tilted_depth(x):
        spec = PotentialSpec(GaussianDimple(x * d, w0), gravity=g_earth, mass=m)
        return analyze_trap(spec, Cs).depth / d - 1

    x = brentq(tilted_depth, 1.0, 2.0, xtol=1e-12)
    geo = analyze_trap(PotentialSpec(GaussianDimple(x * d, w0), gravity=g_earth, mass=m), Cs)
    assert dimple_frequency_with_gravity(d, w0, m, g_earth) == pytest.approx(geo.omega_eff, rel=0.05)


def test_gravity_parameter():
    d, om, T = 10 * k_B * 1e-6, 2 * math.pi * 250, 1e-6
    r_U = g_earth / om**2 + math.sqrt(2 * d / (Rb.mass * om**2))
    assert gravity_parameter(d, om, Rb.mass, T, g_earth) == pytest.approx(
        Rb.mass * g_earth * r_U / (k_B * T), rel=1e-14)
    assert gravity_parameter(d, om, Rb.mass, T, 0.0) == 0.0


def test_dimple_radius_solves_zero():
    spec = PotentialSpec(Sum(Quadrupole(GRAD), GaussianDimple(U_FIG1, 100e-6)))
    r = dimple_radius(spec)
    assert abs(spec.radial(r)) < 1e-12 * U_FIG1
    with pytest.raises(NoBoundMinimum):
        dimple_radius(PotentialSpec(Quadrupole(GRAD)))


def test_invalid_shapes():
    with pytest.raises(ValueError):
        PowerLaw(1.0, 0.0)
    with pytest.raises(ValueError):
        GaussianDimple(-1.0, 1e-4)
    with pytest.raises(ValueError):
        PotentialSpec(Quadrupole(1.0), gravity=9.8)
