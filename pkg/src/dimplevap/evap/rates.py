"""Collision and loss rates for a trapped thermal cloud."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B

from ..errors import InvalidEta

# k_ev^2 = k^2 * (eta/3) * (pi/4); eta = 4 restores k_ev ~ k in an
# infinitely deep quadrupole reservoir
RESERVOIR_ETA = 4.0


def relative_velocity(T, m_atom):
    return 4.0 * np.sqrt(k_B * T / (math.pi * m_atom))


def collision_wavevector(T, eta, m_atom):
    """Thermally averaged k_ev used in the energy-dependent cross section."""
    k = m_atom * relative_velocity(T, m_atom) / (2 * hbar)
    return k * np.sqrt(eta / 3.0 * math.pi / 4.0)


def cross_section(a, T, eta, m_atom):
    """s-wave cross section 8 pi a^2 / (1 + k_ev^2 a^2)."""
    k_ev = collision_wavevector(T, eta, m_atom)
    return 8 * math.pi * a**2 / (1 + (k_ev * a) ** 2)


def elastic_rate(n0, sigma, T, m_atom):
    return n0 * sigma * relative_velocity(T, m_atom)


def evaporation_rate_zero_gravity(Gamma_el, eta, delta):
    return Gamma_el * math.exp(-eta) * (eta - (2.5 + delta)) / math.sqrt(2)


def _expm1_over(x):
    # (e^x - 1)/x with the x -> 0 limit
    return math.expm1(x) / x if x > 1e-12 else 1.0 + 0.5 * x


def _expm1_over_minus_one(x):
    # (e^x - 1)/x - 1, accurate for small x
    if x < 1e-4:
        return x / 2 + x * x / 6 + x**3 / 24
    return math.expm1(x) / x - 1.0


def evaporation_rate_and_energy(Gamma_el, eta, delta, alpha_g):
    """Gravity-averaged escape rate and mean excess energy of escaping atoms.

    Returns ``(Gamma_ev, E_ev / (N k_B T))`` where the second element already
    includes the zero-gravity ``eta + 1``.
    """
    if not eta > 2.5 + delta:
        raise InvalidEta(f"eta = {eta} must exceed 5/2 + delta = {2.5 + delta}")
    if alpha_g < 0:
        raise ValueError("alpha_g must be >= 0")
    pref = Gamma_el * math.exp(-eta - alpha_g) / math.sqrt(2)
    # (eta - 3/2 - delta) q - 1 written as (eta - 5/2 - delta) q + (q - 1)
    q1 = _expm1_over_minus_one(alpha_g)
    bracket = (eta - 2.5 - delta) * (1.0 + q1) + q1
    Gamma_ev = pref * bracket
    # int_0^1 e^{-a u}(c + a u) a u du with c = eta - 5/2 - delta; the a -> 0
    # limit is exact zero, the series keeps small-alpha cancellation harmless
    # the prefactor cancels, so the ratio stays finite when Gamma_el = 0
    excess = ((eta - 0.5 - delta) * q1 - alpha_g) / bracket
    return Gamma_ev, eta + 1.0 + excess


def evaporation_quadrature(Gamma_el, eta, delta, alpha_g, n=4001):
    """Direct theta average of the escape rate and energy (test oracle)."""
    from scipy.integrate import quad

    def rate(theta):
        e = eta + alpha_g * (1 - math.cos(theta))
        return evaporation_rate_zero_gravity(Gamma_el, e, delta)

    def energy(theta):
        e = eta + alpha_g * (1 - math.cos(theta))
        return rate(theta) * (e + 1)

    G = quad(lambda t: rate(t) * math.sin(t), 0, math.pi / 2, epsabs=0, epsrel=1e-13)[0]
    E = quad(lambda t: energy(t) * math.sin(t), 0, math.pi / 2, epsabs=0, epsrel=1e-13)[0]
    return G, E / G


def collision_probability(Gamma_el, omega):
    """Hydrodynamic parameter p_coll ~ Gamma_el / (4 omega) for a harmonic trap."""
    return Gamma_el / (4.0 * omega)


def collision_probability_generic(n0, sigma, delta, sigma_r):
    """p_coll = l * nbar * sigma with l = sqrt(pi) sigma_r, for non-harmonic traps."""
    return math.sqrt(math.pi) * sigma_r * n0 * 2.0**-delta * sigma


def hydro_smoothing(p_coll):
    """Empirical suppression 1 / (1 + p_coll^3)."""
    return 1.0 / (1.0 + p_coll**3)


def three_body_coefficient(a, T, eta, m_atom):
    """Upper-bound L3 = 225 (hbar/m) a^4 / (1 + 0.1 (k_ev a)^4), in m^6/s."""
    k_ev = collision_wavevector(T, eta, m_atom)
    a4 = a**4
    return 225.0 * hbar / m_atom * a4 / (1 + 0.1 * k_ev**4 * a4)


def binding_temperature(a, m_atom):
    """T_h = 2 hbar^2 / (3 m a^2 k_B) of the shallowest molecular state."""
    return 2 * hbar**2 / (3 * m_atom * a**2 * k_B)


@dataclass(frozen=True)
class TBRTerms:
    Gamma_3: float
    T_h: float
    f_TBR: float
    heat_per_event: float


def tbr_terms(a, T, n0, eta, delta, m_atom, p_coll) -> TBRTerms:
    """Three-body loss rate and the heating it deposits per event."""
    L3 = three_body_coefficient(a, T, eta, m_atom)
    Gamma_3 = L3 * n0**2 * 3.0**-delta
    f_p = hydro_smoothing(p_coll)
    if a == 0:
        T_h = math.inf
        heat_h = 0.0
        f_TBR = 1.0 - f_p
    else:
        T_h = binding_temperature(a, m_atom)
        x = T_h / (eta * T)
        # f(x) = 1/(1+x^3) underflows cleanly; T_h * f(x) stays finite
        f_x = 1.0 / (1.0 + x**3) if x < 1e100 else 0.0
        f_TBR = 1.0 - f_p * (1.0 - f_x)
        heat_h = k_B * T_h * f_TBR
    heat = 2.0 / 3.0 * delta * k_B * T + heat_h
    return TBRTerms(Gamma_3=Gamma_3, T_h=T_h, f_TBR=f_TBR, heat_per_event=heat)


def tbr_bound(Gamma_el, T, delta):
    """Upper bound 0.15 * 3^(3/2 - delta) * hbar Gamma_el^2 / (k_B T)."""
    return 0.15 * 3.0 ** (1.5 - delta) * hbar * Gamma_el**2 / (k_B * T)


def bec_time_estimate(D_i, omega, eta=6.0):
    """Crude time to reach D = 1 with Gamma_el ~ omega held constant.

    Anchors: 0.01 omega at eta ~ 6 and 0.001 omega at eta ~ 10, with the
    log of the rate coefficient interpolated (and extrapolated) linearly in eta.
    """
    if not 0 < D_i <= 1:
        raise ValueError("D_i must lie in (0, 1]")
    log_c = math.log(0.01) + (eta - 6.0) / 4.0 * (math.log(0.001) - math.log(0.01))
    return -math.log(D_i) / (math.exp(log_c) * omega)
