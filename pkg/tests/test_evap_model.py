import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import k as k_B

from dimplevap.errors import InvalidEta
from dimplevap.evap import rates as R
from dimplevap.evap.model import (BEC_REACHED, STALLED, EvapSetup, EvapState, TrapControls,
                                  adiabatic_time_fraction, evap_rhs, integrate,
                                  loss_free_psd_gain, optimal_eta, psd_rate, rate_set)
from dimplevap.evap.schedule import (CONSTANT_OMEGA, Constant, ControlSchedule,
                                     ExponentialDecay)
from dimplevap.presets import PRESETS
from dimplevap.scenario import ScenarioConfig, run_evap
from dimplevap.species import CESIUM as Cs, RUBIDIUM87 as Rb, a_0


def _controls(**kw):
    base = dict(eta=9.0, omega=2 * math.pi * 300, w0=100e-6, a=100 * a_0)
    base.update(kw)
    return TrapControls(**base)


def _rb(name, **evap):
    d = PRESETS[name]
    cfg = ScenarioConfig.from_dict(d)
    if evap:
        from dataclasses import replace
        cfg = replace(cfg, evap=replace(cfg.evap, **evap))
    return run_evap(cfg.evap, cfg.species)


@pytest.fixture(scope="module")
def rb_full():
    return _rb("fig8-rb-full")


def test_temperature_from_energy():
    s = EvapState.from_temperature(1e6, 3e-6)
    assert s.T == pytest.approx(3e-6, rel=1e-15)
    assert s.E == 3 * 1e6 * k_B * 3e-6


def test_closed_system_conserves():
    s = EvapState.from_temperature(1e6, 1e-6)
    dN, dE = evap_rhs(s, _controls(eta=80.0, include_tbr=False), Cs)
    assert abs(dN) < 1e-20 * s.N
    assert abs(dE) < 1e-20 * s.E


def test_background_only_decay():
    # eta so large that evaporation is frozen: N decays at Gamma_bg, T stays put
    setup = EvapSetup(Cs, eta0=60, a0=0.0, w0=100e-6, gamma_bg=0.5, gamma_laser_ref=0.0,
                      include_tbr=False)
    tr = integrate(EvapState.from_temperature(1e6, 1e-6), ControlSchedule(), 2.0, setup)
    assert tr.N[-1] == pytest.approx(1e6 * math.exp(-1.0), rel=1e-6)
    assert tr.T[-1] == pytest.approx(1e-6, rel=1e-9)


def test_cs_laser_heating_reference():
    depth = k_B * 1720e-6
    c = _controls(eta=depth / (k_B * 200e-6), gamma_laser_ref=Cs.laser_heating_rate,
                  laser_ref_depth=Cs.laser_reference_depth)
    rs = rate_set(1e8, 200e-6, c, Cs)
    assert rs.Gamma_laser == pytest.approx(11.0)
    assert rs.Gamma_laser * Cs.recoil_temperature == pytest.approx(11 * 0.2e-6, rel=0.05)


def test_psd_rate_loss_free():
    # dilute cloud so f = 1, no losses, no TBR
    c = _controls(include_tbr=False)
    s = EvapState.from_temperature(1e3, 50e-6)
    p = psd_rate(s, c, Cs)
    rs = rate_set(s.N, s.T, c, Cs)
    assert rs.p_coll < 1e-4
    assert p.dD_over_D == pytest.approx(loss_free_psd_gain(9.0, 1.5, rs.Gamma_el) * rs.f_hydro,
                                        rel=1e-12)


@pytest.mark.parametrize("delta, target", [(1.5, 5.6), (3.0, 7.1)])
def test_optimal_eta(delta, target):
    assert optimal_eta(delta) == pytest.approx(target, abs=0.3)


def test_invalid_eta_from_schedule():
    setup = EvapSetup(Cs, eta0=9, a0=100 * a_0, w0=100e-6, include_tbr=False)
    sched = ControlSchedule({"eta": ExponentialDecay(9.0, 3.0, 0.05)})
    with pytest.raises(InvalidEta):
        integrate(EvapState.from_temperature(1e6, 10e-6), sched, 1.0, setup)


def test_schedule_profiles():
    p = ExponentialDecay(9.0, 6.0, 0.2)
    assert p(0) == 9.0
    assert p(1e3) == pytest.approx(6.0)
    h = 1e-6
    assert p.rate(0.1) == pytest.approx((p(0.1 + h) - p(0.1 - h)) / (2 * h), rel=1e-6)
    assert Constant(2.0).rate(3.0) == 0.0
    with pytest.raises(ValueError):
        ExponentialDecay(1, 0, 0)
    with pytest.raises(ValueError):
        ControlSchedule({"omega": Constant(1.0)})


def test_adiabatic_fraction():
    t = np.array([0.0, 1.0, 2.0])
    assert adiabatic_time_fraction(t, [0.0, 0.0, 0.0]) == 1.0
    assert adiabatic_time_fraction(t, [1.0, 1.0, 1.0]) == 0.0
    assert adiabatic_time_fraction(t, [0.0, 0.0, 1.0]) == pytest.approx(0.75)


def test_trajectory_matches_psd_rate():
    # constant omega in zero gravity with every loss switched off: the integrated D must
    # grow at the rate of the closed-form PSD expression
    setup = EvapSetup(Cs, eta0=9, a0=100 * a_0, omega0=2 * math.pi * 300, g_eff=0.0,
                      gamma_bg=0.0, gamma_laser_ref=0.0, include_tbr=False)
    sched = ControlSchedule(waist_policy=CONSTANT_OMEGA)
    tr = integrate(EvapState.from_temperature(2e6, 20e-6), sched, 1.0, setup, stop_at_bec=False,
                   max_step=2e-3)
    c = _controls(omega=2 * math.pi * 300, include_tbr=False)
    pr = np.array([psd_rate(EvapState.from_temperature(N, T), c, Cs).dD_over_D
                   for N, T in zip(tr.N, tr.T)])
    assert np.allclose(tr.dDoverD, pr, rtol=1e-10)
    fd = np.gradient(np.log(tr.D), tr.t)
    inner = slice(5, -5)
    assert np.allclose(fd[inner], pr[inner], rtol=0.01)


def test_rb_n_nonincreasing(rb_full):
    assert np.all(np.diff(rb_full.N) <= 0)


def test_rb_tbr_below_bound(rb_full):
    tr = rb_full
    G_ev = np.array([R.evaporation_rate_and_energy(G, e, 1.5, a)[0]
                     for G, e, a in zip(tr.Gamma_el, tr.eta, tr.alpha_g)])
    G3 = tr.Gamma3_over_Gammaev * G_ev
    bound = np.array([R.tbr_bound(G, T, 1.5) for G, T in zip(tr.Gamma_el, tr.T)])
    assert np.all(G3 <= bound * (1 + 1e-9))


def test_rb_never_hydrodynamic(rb_full):
    assert np.max(rb_full.Gamma_el / (3 * rb_full.omega)) < 1


def test_rb_tolerance_halving(rb_full):
    half = _rb("fig8-rb-full", rtol=5e-9)
    assert half.N[-1] == pytest.approx(rb_full.N[-1], rel=1e-4)
    assert half.T[-1] == pytest.approx(rb_full.T[-1], rel=1e-4)
    assert np.max(half.D) == pytest.approx(np.max(rb_full.D), rel=1e-4)


def test_rb_neither_reaches_bec():
    tr = _rb("fig8-rb-neither")
    assert tr.status == BEC_REACHED
    assert tr.D[-1] == pytest.approx(1.0, rel=1e-6)


def test_stalled_status():
    # 50 ms lifetime kills the gain
    setup = EvapSetup(Cs, eta0=9, a0=100 * a_0, w0=100e-6, gamma_bg=20.0, include_tbr=False)
    tr = integrate(EvapState.from_temperature(1e5, 20e-6), ControlSchedule(), 0.5, setup)
    assert tr.status == STALLED
    assert tr.dDoverD[-1] <= 0


@settings(max_examples=40, deadline=None)
@given(N=st.floats(1e4, 1e8), T=st.floats(1e-6, 3e-4), eta=st.floats(5, 12))
def test_rates_nonnegative(N, T, eta):
    rs = rate_set(N, T, _controls(eta=eta, g_eff=9.81, gamma_bg=0.1), Cs)
    for v in (rs.Gamma_el, rs.Gamma_ev, rs.Gamma_3, rs.Gamma_loss, rs.p_coll):
        assert v >= 0
    assert 0 < rs.f_hydro <= 1
