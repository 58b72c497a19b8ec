"""Stochastic multi-domain ferroelectric capacitor model.

Nucleation-limited switching: the film is a set of independent domains,
each with a binary orientation s in {-1, +1} and an activation field
E_a drawn once from a truncated Gaussian.  Under an applied field E the
switching time constant of a domain follows a Merz-type law

    tau = tau0 * exp((E_a / |E|)^alpha)

and the per-step flip probability of a domain that opposes the field is
the Weibull hazard accumulated through the history integral

    h(t) = int dt' / tau(E(t'), E_a)
    p    = 1 - exp(h^beta - (h + dh)^beta)

History accumulates only while the domain opposes the field sign and
resets to zero when it flips.  Total polarization is the saturation
value scaled by the mean domain state, so it is bounded by +-P_S by
construction.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import CM2_TO_M2, EPS0, NM_TO_M, UC_CM2_TO_C_M2, field_mv_cm

# exp() overflow guard; exponents above this are treated as "never switches"
_EXP_CAP = 700.0


@dataclass
class SwitchingParams:
    """Monte Carlo switching parameters.

    Fields are in practitioner units: tau0 in seconds, activation-field
    distribution in MV/cm (unit recorded in `ea_unit`), dt in seconds.
    """

    tau0: float = 2.0e-8
    alpha: float = 4.0
    beta: float = 2.0
    ea_mean: float = 3.0
    ea_sigma: float = 1.0
    dt: float = 1.0e-5
    ea_unit: str = "MV/cm"

    def __post_init__(self):
        if self.tau0 <= 0:
            raise ValueError(f"tau0 must be > 0, got {self.tau0}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.ea_sigma < 0:
            raise ValueError(f"ea_sigma must be >= 0, got {self.ea_sigma}")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")


def sample_activation_fields(params: SwitchingParams, count: int, seed) -> np.ndarray:
    """Draw `count` positive activation fields (MV/cm), truncated at zero.

    Non-positive draws are redrawn, so the result is a sample from the
    zero-truncated Gaussian N(ea_mean, ea_sigma^2).  Deterministic for a
    fixed seed; `seed` may be an int, a SeedSequence, or a Generator.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if params.ea_sigma == 0.0:
        if params.ea_mean <= 0:
            raise ValueError("degenerate activation-field distribution needs ea_mean > 0")
        return np.full(count, params.ea_mean, dtype=np.float64)
    fields = rng.normal(params.ea_mean, params.ea_sigma, size=count)
    while True:
        bad = fields <= 0.0
        if not bad.any():
            return fields
        fields[bad] = rng.normal(params.ea_mean, params.ea_sigma, size=int(bad.sum()))


def switching_time_constant(e_fe: float, e_a: float, params: SwitchingParams) -> float:
    """Merz-law time constant tau0*exp((e_a/|e_fe|)^alpha), in seconds.

    Fields in MV/cm (only their ratio enters).  Zero applied field maps
    to +inf: the domain effectively never switches.
    """
    if e_a <= 0:
        raise ValueError(f"activation field must be > 0, got {e_a}")
    e = abs(e_fe)
    if e == 0.0:
        return math.inf
    x = (e_a / e) ** params.alpha
    if x > _EXP_CAP:
        return math.inf
    return params.tau0 * math.exp(x)


class FerroCap:
    """Multi-domain ferroelectric capacitor with its own random stream.

    Geometry units follow the datasheet convention: `saturation_polarization`
    in uC/cm^2, `area` in cm^2, `thickness` in nm.  The linear background
    capacitance eps0*eps_r*A/t is constant over a simulation; the switched
    polarization rides on top of it.
    """

    def __init__(self, activation_fields, saturation_polarization=28.0,
                 area=2.5e-5, thickness=10.0, dielectric_permittivity=30.0,
                 seed=0, initial_state=-1):
        self.activation_fields = np.asarray(activation_fields, dtype=np.float64)
        if self.activation_fields.ndim != 1 or self.activation_fields.size < 1:
            raise ValueError("activation_fields must be a non-empty 1-D array")
        if (self.activation_fields <= 0).any():
            raise ValueError("all activation fields must be positive")
        if saturation_polarization < 0:
            raise ValueError("saturation_polarization must be >= 0")
        if area <= 0 or thickness <= 0 or dielectric_permittivity <= 0:
            raise ValueError("area, thickness and permittivity must be positive")
        if initial_state not in (-1, 1):
            raise ValueError("initial_state must be -1 or +1")
        self.saturation_polarization = float(saturation_polarization)
        self.area = float(area)
        self.thickness = float(thickness)
        self.dielectric_permittivity = float(dielectric_permittivity)
        self.states = np.full(self.activation_fields.size, initial_state, dtype=np.int8)
        self.history = np.zeros(self.activation_fields.size, dtype=np.float64)
        self.reseed(seed)

    @classmethod
    def build(cls, params: SwitchingParams, n_domains=1000, seed=0, **kwargs):
        """Sample activation fields and construct the capacitor.

        The seed is split so the quenched disorder (activation fields) and
        the switching stream are independent child streams of one seed.
        """
        root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        fields_ss, stream_ss = root.spawn(2)
        fields = sample_activation_fields(params, n_domains, np.random.default_rng(fields_ss))
        return cls(fields, seed=stream_ss, **kwargs)

    @property
    def n_domains(self) -> int:
        return self.states.size

    @property
    def capacitance(self) -> float:
        """Linear background capacitance, farads."""
        return (EPS0 * self.dielectric_permittivity * self.area * CM2_TO_M2
                / (self.thickness * NM_TO_M))

    @property
    def polarization_charge(self) -> float:
        """Switched polarization charge P_total * A, coulombs."""
        return (polarization(self) * UC_CM2_TO_C_M2) * (self.area * CM2_TO_M2)

    def reseed(self, seed):
        """Replace the switching stream (activation fields unchanged)."""
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    def set_states(self, value):
        """Force all domain states to -1 or +1 and clear histories."""
        if value not in (-1, 1):
            raise ValueError("state must be -1 or +1")
        self.states.fill(value)
        self.history.fill(0.0)


def advance_domains(states, activation_fields, history, e_mv_cm, uniforms,
                    params: SwitchingParams):
    """One Monte Carlo step on raw domain arrays (any shared shape).

    `e_mv_cm` is the applied field in MV/cm, scalar or broadcastable to
    the domain arrays.  `uniforms` must hold one draw per *eligible*
    domain (a domain whose state opposes the field sign), in flat index
    order.  Mutates states/history in place; returns the eligible mask.

    This is the single implementation of the switching update; the
    capacitor-level `step` and the batched device transient both call it.
    """
    e = np.asarray(e_mv_cm, dtype=np.float64)
    sign = np.sign(e).astype(np.int8)
    opposing = (states != sign) & (sign != 0)
    n_el = int(opposing.sum())
    if n_el == 0:
        return opposing
    if uniforms.size != n_el:
        raise ValueError(f"need {n_el} uniforms, got {uniforms.size}")
    e_mag = np.broadcast_to(np.abs(e), states.shape)[opposing]
    x = np.minimum((activation_fields[opposing] / e_mag) ** params.alpha, _EXP_CAP)
    dh = params.dt / (params.tau0 * np.exp(x))
    h0 = history[opposing]
    prob = -np.expm1(h0 ** params.beta - (h0 + dh) ** params.beta)
    flips = uniforms < prob
    idx = np.nonzero(opposing)
    flat_sign = np.broadcast_to(sign, states.shape)[idx]
    states[idx] = np.where(flips, flat_sign, states[idx])
    history[idx] = np.where(flips, 0.0, h0 + dh)
    return opposing


def step(cap: FerroCap, v_fe: float, params: SwitchingParams) -> FerroCap:
    """Advance the capacitor by one dt under the voltage v_fe (volts).

    Domains opposing the field sign accumulate dh = dt/tau and flip with
    the Weibull-hazard probability, consuming one uniform draw each from
    the capacitor's stream; aligned domains are untouched.  Zero voltage
    is an exact identity (states, histories and stream all unchanged).
    Mutates `cap` in place and returns it.
    """
    if v_fe == 0.0:
        return cap
    e = field_mv_cm(v_fe, cap.thickness)
    sign = 1 if e > 0 else -1
    n_el = int((cap.states != sign).sum())
    if n_el == 0:
        return cap
    uniforms = cap.rng.random(n_el)
    advance_domains(cap.states, cap.activation_fields, cap.history, e, uniforms, params)
    return cap


def polarization(cap: FerroCap) -> float:
    """Total polarization P_S * mean(states), in uC/cm^2."""
    return cap.saturation_polarization * float(cap.states.mean())


def triangular_waveform(amplitude: float, period: float, dt: float,
                        n_cycles: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric triangle 0 -> +A -> -A -> 0 sampled at dt.

    Returns (times, voltages); times start at dt (each sample is the end
    of one integration step).
    """
    n = int(round(period / dt)) * n_cycles
    t = dt * np.arange(1, n + 1)
    phase = (t / period) % 1.0
    v = np.where(phase < 0.25, 4.0 * phase,
                 np.where(phase < 0.75, 2.0 - 4.0 * phase, 4.0 * phase - 4.0))
    return t, amplitude * v


def hysteresis_sweep(cap: FerroCap, times, voltages,
                     params: SwitchingParams) -> tuple[np.ndarray, np.ndarray]:
    """Drive the capacitor through a sampled waveform; return (V, Q).

    The waveform must be sampled exactly at the Monte Carlo dt (coarser
    sampling raises ValueError).  Charge is the terminal charge
    Q = P_total*A + C*V in coulombs, recorded after each step.
    """
    times = np.asarray(times, dtype=np.float64)
    voltages = np.asarray(voltages, dtype=np.float64)
    if times.shape != voltages.shape or times.ndim != 1:
        raise ValueError("times and voltages must be matching 1-D arrays")
    spacing = np.diff(times)
    if times.size >= 2 and (spacing > params.dt * (1.0 + 1e-9)).any():
        raise ValueError(
            f"waveform sampling {spacing.max():.3e}s is coarser than dt={params.dt:.3e}s")
    area_m2 = cap.area * CM2_TO_M2
    cap_f = cap.capacitance
    charges = np.empty_like(voltages)
    for i, v in enumerate(voltages):
        step(cap, float(v), params)
        charges[i] = polarization(cap) * UC_CM2_TO_C_M2 * area_m2 + cap_f * v
    return voltages.copy(), charges


def loop_area(voltages, charges) -> float:
    """Signed area enclosed by a closed (V, Q) trajectory (shoelace).

    Positive for the counterclockwise traversal a switching capacitor
    produces; zero for a pure linear capacitor.
    """
    v = np.asarray(voltages, dtype=np.float64)
    q = np.asarray(charges, dtype=np.float64)
    return 0.5 * float(np.sum(v * np.roll(q, -1) - np.roll(v, -1) * q))
