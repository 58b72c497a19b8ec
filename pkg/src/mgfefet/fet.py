"""Long-channel FET compact model and its gate C-V.

Drain current uses an EKV-style interpolation: exponential in weak
inversion with the configured subthreshold swing, square-law/linear above
threshold, continuous and strictly monotone in the gate potential.  At a
small fixed drain bias the strong-inversion branch is linear in the gate
potential, i.e. hinge-shaped on a linear scale.

The gate capacitance is the textbook depletion-approximation C-V: full
oxide capacitance in accumulation, oxide in series with the depletion
capacitance while the surface potential is below 2*phi_B, and a smooth
recovery to the oxide value once the inversion layer forms.  The charge
balance of the multi-gate stack consumes this curve as its regime-
dependent gate capacitance.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import (CM2_TO_M2, EPS0, EPS_SI, LN10, NI_SI_CM3, NM_TO_M,
                        Q_E, thermal_voltage)

# width of the exponential C-V recovery into strong inversion, volts
_INVERSION_TRANSITION_V = 0.1


@dataclass
class FetParams:
    """Transistor parameters.

    `mobility_factor` is the lumped transconductance prefactor
    mu*Cox'*(W/L) per unit W/L in A/V^2; `aspect_ratio` carries W/L
    separately so geometry can be varied without retuning mobility.
    Defaults reflect the calibrated co-simulation operating point.
    """

    oxide_thickness: float = 10.0        # nm
    oxide_permittivity: float = 3.9
    channel_area: float = 2.5e-2         # cm^2
    aspect_ratio: float = 1.0            # W/L
    substrate_doping: float = 1.0e15     # cm^-3
    temperature: float = 300.0           # K
    threshold_voltage: float = 0.05      # V
    mobility_factor: float = 1.0e-3      # A/V^2
    subthreshold_swing: float = 90.0     # mV/decade
    off_current_floor: float = 1.0e-13   # A
    flatband_voltage: float = 0.0        # V
    constant_capacitance: float | None = None  # fixed C0 override, farads

    def __post_init__(self):
        if self.oxide_thickness <= 0:
            raise ValueError("oxide_thickness must be > 0")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.off_current_floor <= 0:
            raise ValueError("off_current_floor must be > 0")
        if self.channel_area <= 0 or self.aspect_ratio <= 0:
            raise ValueError("channel geometry must be positive")
        ss_limit = thermal_voltage(self.temperature) * LN10 * 1e3  # mV/dec
        if self.subthreshold_swing < ss_limit * (1.0 - 1e-9):
            raise ValueError(
                f"subthreshold swing {self.subthreshold_swing} mV/dec is below the "
                f"thermal limit {ss_limit:.1f} mV/dec at {self.temperature} K")


def oxide_capacitance(params: FetParams) -> float:
    """Full oxide capacitance eps0*eps_ox*A/t_ox, farads."""
    return (EPS0 * params.oxide_permittivity * params.channel_area * CM2_TO_M2
            / (params.oxide_thickness * NM_TO_M))


def _bulk_potential(params: FetParams) -> float:
    """phi_B = vt * ln(Na/ni)."""
    return thermal_voltage(params.temperature) * math.log(params.substrate_doping / NI_SI_CM3)


def _body_factor(params: FetParams) -> float:
    """gamma = sqrt(2 q eps_si Na) / Cox', in V^0.5."""
    na_m3 = params.substrate_doping * 1e6
    cox_area = EPS0 * params.oxide_permittivity / (params.oxide_thickness * NM_TO_M)
    return math.sqrt(2.0 * Q_E * EPS_SI * EPS0 * na_m3) / cox_area


def surface_potential(phi_f, params: FetParams):
    """Depletion-approximation surface potential, pinned at 2*phi_B.

    Solves v = psi + gamma*sqrt(psi) in closed form for gate overdrive
    v = phi_f - V_FB > 0; returns 0 in accumulation.
    """
    v = np.asarray(phi_f, dtype=np.float64) - params.flatband_voltage
    gamma = _body_factor(params)
    sqrt_psi = 0.5 * (np.sqrt(gamma * gamma + 4.0 * np.maximum(v, 0.0)) - gamma)
    psi = np.minimum(sqrt_psi * sqrt_psi, 2.0 * _bulk_potential(params))
    return psi if psi.ndim else float(psi)


def cv_threshold(params: FetParams) -> float:
    """Gate voltage where the surface potential pins at 2*phi_B."""
    psi_inv = 2.0 * _bulk_potential(params)
    return params.flatband_voltage + psi_inv + _body_factor(params) * math.sqrt(psi_inv)


def mos_capacitance(phi_f, params: FetParams):
    """Regime-dependent gate capacitance C0(phi_f), farads.

    Accumulation and strong inversion approach the full oxide value; in
    depletion the oxide is in series with eps_si/W_d computed from the
    depletion width at the surface potential.  Continuous everywhere;
    scalar in, scalar out, arrays broadcast.
    """
    if params.constant_capacitance is not None:
        c = np.broadcast_to(params.constant_capacitance,
                            np.asarray(phi_f, dtype=np.float64).shape)
        return params.constant_capacitance if c.ndim == 0 else c.copy()
    phi = np.asarray(phi_f, dtype=np.float64)
    scalar = phi.ndim == 0
    phi = np.atleast_1d(phi)
    v = phi - params.flatband_voltage
    cox = oxide_capacitance(params)
    psi = np.atleast_1d(surface_potential(phi, params))
    na_m3 = params.substrate_doping * 1e6
    # depletion width; psi -> 0 gives W_d -> 0 and the series C -> Cox
    w_d = np.sqrt(2.0 * EPS_SI * EPS0 * np.maximum(psi, 0.0) / (Q_E * na_m3))
    area_m2 = params.channel_area * CM2_TO_M2
    series = cox / (1.0 + cox * w_d / (EPS_SI * EPS0 * area_m2))
    c = np.where(v <= 0.0, cox, series)
    # inversion-layer response brings C back to Cox above the C-V threshold
    v_on = cv_threshold(params) - params.flatband_voltage
    over = v - v_on
    mask = over > 0.0
    if mask.any():
        recover = 1.0 - np.exp(-over[mask] / _INVERSION_TRANSITION_V)
        c_floor = c[mask]
        c[mask] = c_floor + (cox - c_floor) * recover
    return float(c[0]) if scalar else c


def drain_current(phi_f, v_ds, params: FetParams):
    """Drain current of the long-channel model, amperes.

    I = 2*n*beta*vt^2 * [F((vp)/vt) - F((vp - n_norm...))] + floor with
    F(u) = ln(1 + exp(u/2))^2 and pinch-off voltage vp = (phi_f - V_T)/n:
    exponential below threshold with the configured swing, linear in
    phi_f at small drain bias above it, square-law in saturation.
    Strictly increasing in phi_f and non-decreasing in v_ds.
    """
    phi = np.asarray(phi_f, dtype=np.float64)
    vds = np.asarray(v_ds, dtype=np.float64)
    if (vds < 0).any():
        raise ValueError("drain bias must be >= 0")
    scalar = phi.ndim == 0 and vds.ndim == 0
    vt = thermal_voltage(params.temperature)
    n = params.subthreshold_swing * 1e-3 / (vt * LN10)
    beta = params.mobility_factor * params.aspect_ratio
    vp = (phi - params.threshold_voltage) / n
    # F(u) = log(1+exp(u/2))^2 via logaddexp for overflow safety
    i_f = np.logaddexp(0.0, vp / (2.0 * vt)) ** 2
    i_r = np.logaddexp(0.0, (vp - vds) / (2.0 * vt)) ** 2
    current = 2.0 * n * beta * vt * vt * (i_f - i_r) + params.off_current_floor
    return float(current) if scalar else current
