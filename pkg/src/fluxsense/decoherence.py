"""Decoherence channels of the flux sensor.

Energy relaxation is dominated by photon loss through the readout
resonator and by inductive / capacitive coupling into the control
wiring.  Pure dephasing comes from 1/f flux noise (a Gaussian decay
from the first flux derivative and a time-linear decay from the second)
and from 1/f critical-current noise.  Quasiparticle and dielectric
contributions are negligible for this design and carried as explicit
zeros.

Every rate is returned in 1/s.  Tabulated output converts to kHz by
dividing by 1000 (no 2 pi).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .qubit import (
    CONSTANTS,
    FluxBias,
    SensorDesign,
    _d2_omega_d_phi2,
    _d_omega_d_ln_ic,
    _d_omega_d_phi,
    _f_q,
    _omega_q,
    _require_operational,
)

RATES_TABLE_HEADER = (
    "phi",
    "gamma1_cav_khz",
    "gamma1_ind_khz",
    "gamma1_cap_khz",
    "gammaphi_flux_exp_khz",
    "gammaphi_flux_gauss_khz",
    "gammaphi_curr_khz",
)


@dataclass(frozen=True)
class DecayRates:
    """All decoherence channels at one bias point, in 1/s.

    ``envelope_a`` multiplies t and ``envelope_b`` squares with t in the
    fringe decay exp(-(A t + B^2 t^2)).
    """

    gamma1_cav: float
    gamma1_ind: float
    gamma1_cap: float
    gamma_phi_flux_exp: float
    gamma_phi_flux_gauss: float
    gamma_phi_curr_gauss: float
    envelope_a: float
    envelope_b: float
    gamma1_qp: float = 0.0    # quasiparticle channel, negligible here
    gamma1_diel: float = 0.0  # dielectric channel, negligible here


def _purcell(design: SensorDesign, phi):
    omega_q = _omega_q(design, phi)
    ratio = (design.f_q_max + design.e_c_over_h) / design.e_c_over_h
    g01_sq = (
        design.beta**2
        * CONSTANTS.e**2
        * (design.z0 / CONSTANTS.h)
        * (omega_q + design.delta) ** 2
        * ratio
        * np.sqrt(np.cos(np.pi * phi))
    )
    return design.kappa * g01_sq / design.delta**2


def _inductive(design: SensorDesign, phi):
    e_c = CONSTANTS.h * design.e_c_over_h
    omega_max_plus = 2 * np.pi * (design.f_q_max + design.e_c_over_h)
    l_j = 2 * e_c / (CONSTANTS.e**2 * omega_max_plus**2 * np.cos(np.pi * phi))
    omega_q = _omega_q(design, phi)
    return (design.m_ind**2 + design.m_parasitic**2) * omega_q**2 / (l_j * design.z0)


def _capacitive(design: SensorDesign, phi):
    omega_q = _omega_q(design, phi)
    return omega_q**2 * design.z0 * design.c_c**2 / design.c_qg


def _flux_gauss(design: SensorDesign, phi):
    return design.alpha_flux * np.abs(_d_omega_d_phi(design, phi))


def _flux_exp(design: SensorDesign, phi):
    return np.pi**2 * design.alpha_flux**2 * np.abs(_d2_omega_d_phi2(design, phi))


def _curr_gauss(design: SensorDesign, phi):
    return design.gamma_ic * np.abs(_d_omega_d_ln_ic(design, phi))


def _envelope_ab(design: SensorDesign, phi):
    a = (_purcell(design, phi) + _inductive(design, phi) + _capacitive(design, phi)) / 2.0
    a = a + _flux_exp(design, phi)
    b = np.hypot(_flux_gauss(design, phi), _curr_gauss(design, phi))
    return a, b


def purcell_rate(design: SensorDesign, bias: FluxBias) -> float:
    """Relaxation through the readout resonator, kappa g01^2 / delta^2."""
    _require_operational(bias.phi)
    return float(_purcell(design, bias.phi))


def inductive_rate(design: SensorDesign, bias: FluxBias) -> float:
    """Relaxation into the bias line through M and M'."""
    _require_operational(bias.phi)
    return float(_inductive(design, bias.phi))


def capacitive_rate(design: SensorDesign, bias: FluxBias) -> float:
    """Relaxation into the drive line through the coupling capacitance."""
    _require_operational(bias.phi)
    return float(_capacitive(design, bias.phi))


def flux_dephasing_rates(design: SensorDesign, bias: FluxBias) -> tuple[float, float]:
    """Flux-noise dephasing as (gaussian_rate, exponential_rate).

    The Gaussian rate multiplies t^2 in the decay exponent and vanishes
    at the sweet spot; the exponential rate multiplies t and comes from
    the spectrum curvature, so it survives at the sweet spot.
    """
    _require_operational(bias.phi)
    return float(_flux_gauss(design, bias.phi)), float(_flux_exp(design, bias.phi))


def critical_current_dephasing_rate(design: SensorDesign, bias: FluxBias) -> float:
    """Gaussian dephasing rate from 1/f critical-current noise."""
    _require_operational(bias.phi)
    return float(_curr_gauss(design, bias.phi))


def composite_rates(design: SensorDesign, bias: FluxBias) -> DecayRates:
    """Evaluate every channel and fold them into the fringe envelope.

    envelope_a = (sum of relaxation rates)/2 + exponential flux dephasing
    envelope_b = quadrature sum of the Gaussian dephasing rates
    """
    _require_operational(bias.phi)
    phi = bias.phi
    cav = float(_purcell(design, phi))
    ind = float(_inductive(design, phi))
    cap = float(_capacitive(design, phi))
    fl_gauss = float(_flux_gauss(design, phi))
    fl_exp = float(_flux_exp(design, phi))
    curr = float(_curr_gauss(design, phi))
    a = (cav + ind + cap) / 2.0 + fl_exp
    b = float(np.hypot(fl_gauss, curr))
    return DecayRates(
        gamma1_cav=cav,
        gamma1_ind=ind,
        gamma1_cap=cap,
        gamma_phi_flux_exp=fl_exp,
        gamma_phi_flux_gauss=fl_gauss,
        gamma_phi_curr_gauss=curr,
        envelope_a=a,
        envelope_b=b,
    )


def rates_table(design: SensorDesign, phi_values) -> str:
    """Render the per-channel rates at each flux point as CSV text (kHz)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(RATES_TABLE_HEADER)
    for phi in phi_values:
        r = composite_rates(design, FluxBias(float(phi)))
        row = (
            phi,
            r.gamma1_cav / 1e3,
            r.gamma1_ind / 1e3,
            r.gamma1_cap / 1e3,
            r.gamma_phi_flux_exp / 1e3,
            r.gamma_phi_flux_gauss / 1e3,
            r.gamma_phi_curr_gauss / 1e3,
        )
        writer.writerow(f"{v:.9g}" for v in row)
    return buf.getvalue()
