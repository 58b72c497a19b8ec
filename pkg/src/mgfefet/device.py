"""Multi-gate FeFET neuron: N ferroelectric gate capacitors over one FET.

The floating gate shared by all gate capacitors sits at the potential
phi_F that balances charge:

    C0(phi_F)*phi_F + delta = sum_i [ P_i*A_i + C_i*(V_i - phi_F) ]

with C0 the regime-dependent MOS gate capacitance and delta an optional
residual floating-gate charge.  The balance is monotone in phi_F (all
capacitances positive), so a bisection solve is unconditionally
convergent.  A transient alternates, per Monte Carlo step: freeze
polarization -> solve phi_F -> apply the per-gate field (V_i - phi_F)/t
to the domain model -> advance.

Gate-axis charge sums are evaluated in sorted order so that permuting
gate inputs together with gate-local streams reproduces results
bit-identically.
"""

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import fet as _fet
from .constants import CM2_TO_M2, UC_CM2_TO_C_M2
from .errors import SolverError
from .ferrodomain import (FerroCap, SwitchingParams, advance_domains,
                          polarization, step as _domain_step)

_REL_TOL = 1e-9        # solver residual relative to the dominant charge term
_VOLTAGE_TOL = 1e-5    # bisection interval tolerance, volts
_MAX_ITER = 200
_SCALE_FLOOR = 1e-18   # charge scale floor, coulombs


# ---------------------------------------------------------------------------
# pulse programs
# ---------------------------------------------------------------------------

@dataclass
class PulseProgram:
    """Piecewise-constant drive: per-gate (voltage, duration) segments.

    All durations must be positive multiples of the Monte Carlo dt and
    every gate must tile the same total duration.  The drain bias is
    applied only inside the read window.
    """

    gate_segments: tuple            # per gate: tuple of (volts, seconds)
    drain_voltage: float = 0.1
    source_voltage: float = 0.0
    read_window: tuple = (0.0, 0.0)  # (t_start, t_end), seconds

    def total_duration(self) -> float:
        return sum(d for _, d in self.gate_segments[0])

    def validate(self, dt: float, n_gates: int) -> None:
        if len(self.gate_segments) != n_gates:
            raise ValueError(
                f"program drives {len(self.gate_segments)} gates, device has {n_gates}")
        totals = []
        for segs in self.gate_segments:
            if not segs:
                raise ValueError("every gate needs at least one segment")
            for v, d in segs:
                if d <= 0:
                    raise ValueError(f"segment duration must be > 0, got {d}")
                _steps_of(d, dt)
            totals.append(sum(d for _, d in segs))
        if max(totals) - min(totals) > 1e-12:
            raise ValueError(f"gate segments tile different durations: {totals}")
        t0, t1 = self.read_window
        if not (0.0 <= t0 <= t1 <= totals[0] * (1 + 1e-12)):
            raise ValueError(f"read window {self.read_window} outside program span")
        if self.drain_voltage - self.source_voltage < 0:
            raise ValueError("drain-source bias must be >= 0")

    def compile(self, dt: float, n_gates: int):
        """Expand to per-step arrays: V (T, N), v_ds (T,), read mask (T,)."""
        self.validate(dt, n_gates)
        n_steps = _steps_of(self.total_duration(), dt)
        volts = np.zeros((n_steps, n_gates))
        for g, segs in enumerate(self.gate_segments):
            pos = 0
            for v, d in segs:
                n = _steps_of(d, dt)
                volts[pos:pos + n, g] = v
                pos += n
        # a step covers (t, t+dt]; it reads if its end time is inside the window
        t_end = dt * np.arange(1, n_steps + 1)
        read = (t_end > self.read_window[0] + dt * 1e-6) & \
               (t_end <= self.read_window[1] + dt * 1e-6)
        vds = np.where(read, self.drain_voltage - self.source_voltage, 0.0)
        return volts, vds, read


def _steps_of(duration: float, dt: float) -> int:
    n = duration / dt
    if abs(n - round(n)) > 1e-6 * max(1.0, n) or round(n) < 1:
        raise ValueError(f"duration {duration}s is not a positive multiple of dt={dt}s")
    return int(round(n))


def standard_program(set_voltages, *, reset_voltage=-3.0, reset_duration=1e-3,
                     set_duration=1e-3, read_duration=1e-3, drain_voltage=0.1,
                     source_voltage=0.0) -> PulseProgram:
    """Reset / set / read sequence used by the characterization sweeps.

    Every gate gets the same reset pulse, its own set amplitude, then
    0 V while the drain current is read.
    """
    segs = tuple(
        ((reset_voltage, reset_duration), (float(v), set_duration), (0.0, read_duration))
        for v in set_voltages)
    t_read = reset_duration + set_duration
    return PulseProgram(gate_segments=segs, drain_voltage=drain_voltage,
                        source_voltage=source_voltage,
                        read_window=(t_read, t_read + read_duration))


# ---------------------------------------------------------------------------
# device
# ---------------------------------------------------------------------------

class MultiGateDevice:
    """N ferroelectric gates sharing one floating gate over one FET."""

    def __init__(self, gates, fet: _fet.FetParams, switching: SwitchingParams,
                 floating_charge: float = 0.0):
        if len(gates) < 1:
            raise ValueError("need at least one gate")
        self.gates = list(gates)
        self.fet = fet
        self.switching = switching
        self.floating_charge = float(floating_charge)

    @classmethod
    def build(cls, switching: SwitchingParams, fet: _fet.FetParams, *, n_gates=3,
              n_domains=1000, seed=0, floating_charge=0.0, **cap_kwargs):
        """Construct with per-gate child seeds spawned from one root seed."""
        root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        children = root.spawn(n_gates)
        gates = [FerroCap.build(switching, n_domains=n_domains, seed=ss, **cap_kwargs)
                 for ss in children]
        return cls(gates, fet, switching, floating_charge)

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    def capacitances(self) -> np.ndarray:
        return np.array([g.capacitance for g in self.gates])

    def config_dict(self) -> dict:
        g0 = self.gates[0]
        return {
            "n_gates": self.n_gates,
            "n_domains": [g.n_domains for g in self.gates],
            "saturation_polarization": [g.saturation_polarization for g in self.gates],
            "area_cm2": [g.area for g in self.gates],
            "thickness_nm": [g.thickness for g in self.gates],
            "dielectric_permittivity": g0.dielectric_permittivity,
            "floating_charge": self.floating_charge,
            "switching": vars(self.switching).copy(),
            "fet": {k: v for k, v in vars(self.fet).items()},
        }


# ---------------------------------------------------------------------------
# charge-balance solve
# ---------------------------------------------------------------------------

def _sorted_sum(x, axis=-1):
    """Order-independent sum: sort by value first, then accumulate."""
    return np.sort(np.asarray(x, dtype=np.float64), axis=axis).sum(axis=axis)


class _ScalarFetCtx:
    """Precomputed constants for the float-only C-V fast path."""

    def __init__(self, p: _fet.FetParams):
        self.const = p.constant_capacitance
        self.vfb = p.flatband_voltage
        self.cox = _fet.oxide_capacitance(p)
        self.gamma = _fet._body_factor(p)
        self.psi_inv = 2.0 * _fet._bulk_potential(p)
        self.v_on = _fet.cv_threshold(p) - p.flatband_voltage
        na_m3 = p.substrate_doping * 1e6
        self.wd_coeff = 2.0 * _fet.EPS_SI * _fet.EPS0 / (_fet.Q_E * na_m3)
        self.eps_area = _fet.EPS_SI * _fet.EPS0 * p.channel_area * CM2_TO_M2
        self.inv_width = _fet._INVERSION_TRANSITION_V

    def c0(self, phi: float) -> float:
        if self.const is not None:
            return self.const
        v = phi - self.vfb
        if v <= 0.0:
            return self.cox
        sqrt_psi = 0.5 * (math.sqrt(self.gamma * self.gamma + 4.0 * v) - self.gamma)
        psi = min(sqrt_psi * sqrt_psi, self.psi_inv)
        w_d = math.sqrt(self.wd_coeff * psi)
        c = self.cox / (1.0 + self.cox * w_d / self.eps_area)
        if v > self.v_on:
            c += (self.cox - c) * (1.0 - math.exp(-(v - self.v_on) / self.inv_width))
        return c


def _solve_scalar(s_cv, s_pa, s_abs, sum_c, delta, ctx: _ScalarFetCtx):
    """Bisection on the charge balance, pure-float path.  Returns (phi, rel_res)."""
    rhs = s_cv + s_pa - delta
    scale = max(abs(s_cv), abs(s_pa), abs(delta), _SCALE_FLOOR)
    bound = (s_abs + abs(delta)) / sum_c + 1.0
    lo, hi = -bound, bound
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        f = (ctx.c0(mid) + sum_c) * mid - rhs
        if abs(f) <= _REL_TOL * scale and (hi - lo) <= _VOLTAGE_TOL:
            return mid, abs(f) / scale
        if f > 0.0:
            hi = mid
        else:
            lo = mid
    raise SolverError("charge balance did not converge", residual=abs(f) / scale)


def _solve_vector(s_cv, s_pa, s_abs, sum_c, delta, fet_params):
    """Vectorized bisection over a batch of lanes.  Returns (phi, rel_res)."""
    s_cv = np.asarray(s_cv, dtype=np.float64)
    rhs = s_cv + s_pa - delta
    scale = np.maximum(np.maximum(np.abs(s_cv), np.abs(s_pa)),
                       max(abs(delta), _SCALE_FLOOR))
    bound = (s_abs + abs(delta)) / sum_c + 1.0
    lo, hi = -bound, bound.copy()
    phi = np.zeros_like(rhs)
    active = np.ones(rhs.shape, dtype=bool)
    f = np.zeros_like(rhs)
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        f = (_fet.mos_capacitance(mid, fet_params) + sum_c) * mid - rhs
        done = active & (np.abs(f) <= _REL_TOL * scale) & ((hi - lo) <= _VOLTAGE_TOL)
        phi = np.where(done, mid, phi)
        active &= ~done
        if not active.any():
            break
        go_hi = active & (f > 0.0)
        hi = np.where(go_hi, mid, hi)
        lo = np.where(active & ~go_hi, mid, lo)
    if active.any():
        lane = int(np.flatnonzero(active)[0])
        raise SolverError("charge balance did not converge",
                          residual=float(np.abs(f[lane]) / scale[lane]), cell=lane)
    rel = np.abs((_fet.mos_capacitance(phi, fet_params) + sum_c) * phi - rhs) / scale
    return phi, rel


def solve_floating_gate(device: MultiGateDevice, terminal_voltages) -> float:
    """Solve phi_F for the current frozen polarizations, volts.

    Residual converges to 1e-9 of the dominant charge term; raises
    SolverError (carrying the last residual) past the iteration cap.
    """
    volts = np.asarray(terminal_voltages, dtype=np.float64)
    if volts.shape != (device.n_gates,):
        raise ValueError(f"expected {device.n_gates} terminal voltages, got {volts.shape}")
    caps = device.capacitances()
    pa = np.array([g.polarization_charge for g in device.gates])
    s_cv = _sorted_sum(caps * volts)
    s_pa = _sorted_sum(pa)
    s_abs = _sorted_sum(np.abs(caps * volts)) + _sorted_sum(np.abs(pa))
    sum_c = _sorted_sum(caps)
    ctx = _ScalarFetCtx(device.fet)
    phi, _ = _solve_scalar(s_cv, s_pa, s_abs, sum_c, device.floating_charge, ctx)
    return phi


# ---------------------------------------------------------------------------
# transients
# ---------------------------------------------------------------------------

@dataclass
class ProgramTrace:
    """Per-step record of one pulse program run."""

    times: np.ndarray            # step end times, s
    phi_f: np.ndarray            # floating-gate voltage, V
    polarizations: np.ndarray    # (T, N), uC/cm^2
    i_d: np.ndarray              # drain current, A (0 bias outside read)
    read_mask: np.ndarray
    max_rel_residual: float

    @property
    def read_current(self) -> float:
        """Mean drain current over the read window."""
        return float(self.i_d[self.read_mask].mean())

    @property
    def read_phi(self) -> float:
        return float(self.phi_f[self.read_mask].mean())

    @property
    def final_polarizations(self) -> np.ndarray:
        return self.polarizations[-1].copy()


def run_program(device: MultiGateDevice, program: PulseProgram, seed=None,
                gate_seeds=None) -> ProgramTrace:
    """Execute a pulse program on the device (mutates gate states).

    Per dt step: solve phi_F from the frozen polarization, apply the
    per-gate ferroelectric voltage V_i - phi_F to the domain model, and
    record the drain current.  `seed` reseeds the per-gate streams
    deterministically as children (seed, gate_index); `gate_seeds` gives
    explicit per-gate entropy instead (they travel with the gate, which
    makes gate permutation an exact symmetry).
    """
    params = device.switching
    volts, vds, read = program.compile(params.dt, device.n_gates)
    if gate_seeds is not None:
        if len(gate_seeds) != device.n_gates:
            raise ValueError("need one seed per gate")
        for g, s in zip(device.gates, gate_seeds):
            g.reseed(np.random.SeedSequence(s))
    elif seed is not None:
        for i, g in enumerate(device.gates):
            g.reseed(np.random.SeedSequence((int(seed), i)))

    n_steps = volts.shape[0]
    caps = device.capacitances()
    sum_c = _sorted_sum(caps)
    ctx = _ScalarFetCtx(device.fet)
    delta = device.floating_charge

    phi_tr = np.empty(n_steps)
    pol_tr = np.empty((n_steps, device.n_gates))
    i_tr = np.zeros(n_steps)
    max_res = 0.0
    t = params.dt * np.arange(1, n_steps + 1)

    for k in range(n_steps):
        pa = np.array([g.polarization_charge for g in device.gates])
        cv = caps * volts[k]
        try:
            phi, res = _solve_scalar(float(_sorted_sum(cv)), float(_sorted_sum(pa)),
                                     float(_sorted_sum(np.abs(cv)) + _sorted_sum(np.abs(pa))),
                                     float(sum_c), delta, ctx)
        except SolverError as err:
            err.time = float(t[k])
            raise
        max_res = max(max_res, res)
        for i, g in enumerate(device.gates):
            _domain_step(g, float(volts[k, i] - phi), params)
        phi_tr[k] = phi
        pol_tr[k] = [polarization(g) for g in device.gates]
        if read[k]:
            i_tr[k] = _fet.drain_current(phi, float(vds[k]), device.fet)
    return ProgramTrace(times=t, phi_f=phi_tr, polarizations=pol_tr, i_d=i_tr,
                        read_mask=read, max_rel_residual=max_res)


# ---------------------------------------------------------------------------
# batched transient (lockstep cells; per-lane streams keep cells independent)
# ---------------------------------------------------------------------------

@dataclass
class BatchResult:
    read_current: np.ndarray     # (B,)
    read_phi: np.ndarray         # (B,)
    final_mean_state: np.ndarray  # (B, N)
    max_rel_residual: float


def run_batch(template: MultiGateDevice, phases, streams=None, chunk_rng=None,
              initial_state=-1) -> BatchResult:
    """Run many independent devices through the same phase timing.

    `phases` is a list of (n_steps, volts (B, N), v_ds, is_read); each
    phase holds its voltages constant.  `streams` is a (B, N) nested list
    of per-gate Generators (cells evolve independently of batch order);
    alternatively one `chunk_rng` draws for the whole batch in canonical
    lane order, which is faster for throughput-bound inference.
    """
    params = template.switching
    b = phases[0][1].shape[0]
    n = template.n_gates
    m = template.gates[0].n_domains
    caps = template.capacitances()
    areas_m2 = np.array([g.area * CM2_TO_M2 for g in template.gates])
    p_s = np.array([g.saturation_polarization for g in template.gates])
    thick = np.array([g.thickness for g in template.gates])
    sum_c = float(_sorted_sum(caps))
    delta = template.floating_charge

    fields = np.broadcast_to(
        np.stack([g.activation_fields for g in template.gates]), (b, n, m))
    states = np.full((b, n, m), initial_state, dtype=np.int8)
    history = np.zeros((b, n, m))

    pol_coeff = p_s * UC_CM2_TO_C_M2 * areas_m2    # (N,) charge per unit mean state
    max_res = 0.0
    cur_sum = np.zeros(b)
    phi_sum = np.zeros(b)
    n_read = 0

    for n_steps, volts, v_ds, is_read in phases:
        cv = caps * volts                                   # (B, N)
        s_cv = _sorted_sum(cv, axis=1)
        s_cv_abs = _sorted_sum(np.abs(cv), axis=1)
        for _ in range(n_steps):
            mean_state = states.mean(axis=2)                # (B, N)
            pa = pol_coeff * mean_state
            s_pa = _sorted_sum(pa, axis=1)
            s_abs = s_cv_abs + _sorted_sum(np.abs(pa), axis=1)
            phi, res = _solve_vector(s_cv, s_pa, s_abs, sum_c, delta, template.fet)
            max_res = max(max_res, float(res.max()))
            e = (volts - phi[:, None]) / thick * 10.0       # MV/cm, (B, N)
            sign = np.sign(e).astype(np.int8)[:, :, None]
            opposing = (states != sign) & (sign != 0)
            counts = opposing.sum(axis=2)
            total = int(counts.sum())
            if total:
                if chunk_rng is not None:
                    u = chunk_rng.random(total)
                else:
                    draws = [streams[i][j].random(int(counts[i, j]))
                             for i in range(b) for j in range(n) if counts[i, j]]
                    u = np.concatenate(draws) if draws else np.empty(0)
                advance_domains(states, fields, history, e[:, :, None], u, params)
            if is_read:
                cur_sum += _fet.drain_current(phi, v_ds, template.fet)
                phi_sum += phi
                n_read += 1
    if n_read == 0:
        raise ValueError("program has no read window")
    return BatchResult(read_current=cur_sum / n_read, read_phi=phi_sum / n_read,
                       final_mean_state=states.mean(axis=2), max_rel_residual=max_res)


# ---------------------------------------------------------------------------
# characterization sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    """Cartesian set-voltage grid of read currents and floating-gate voltages."""

    amplitudes: np.ndarray
    n_gates: int
    i_d: np.ndarray              # shape (n_amp,)*N
    phi_f: np.ndarray
    seed: int
    params_hash: str
    max_rel_residual: float

    def rows(self):
        """Flatten to (V_1..V_N, i_d, phi_f) rows in row-major cell order."""
        grids = np.meshgrid(*([self.amplitudes] * self.n_gates), indexing="ij")
        cols = [g.reshape(-1) for g in grids]
        return np.column_stack(cols + [self.i_d.reshape(-1), self.phi_f.reshape(-1)])


def sweep_grid(template: MultiGateDevice, amplitudes, seed=0, *,
               reset_voltage=-3.0, reset_duration=1e-3, set_duration=1e-3,
               read_duration=1e-3, drain_voltage=0.1) -> SweepResult:
    """Reset+set+read over the full N-fold Cartesian amplitude product.

    Every cell is an independent run: the template's activation fields
    are shared (one physical device) while the switching streams are
    reseeded per (seed, cell index, gate index), so cells may execute in
    any order or in parallel with identical results.
    """
    amplitudes = np.asarray(sorted(float(a) for a in amplitudes))
    if amplitudes.size == 0:
        raise ValueError("amplitudes must be non-empty")
    n = template.n_gates
    cells = np.array(list(itertools.product(amplitudes, repeat=n)))
    b = cells.shape[0]
    params = template.switching
    streams = [[np.random.default_rng(np.random.SeedSequence((int(seed), ci, gi)))
                for gi in range(n)] for ci in range(b)]

    n_reset = _steps_of(reset_duration, params.dt)
    n_set = _steps_of(set_duration, params.dt)
    n_read = _steps_of(read_duration, params.dt)
    phases = [
        (n_reset, np.full((b, n), reset_voltage), 0.0, False),
        (n_set, cells, 0.0, False),
        (n_read, np.zeros((b, n)), drain_voltage, True),
    ]
    try:
        out = run_batch(template, phases, streams=streams)
    except SolverError as err:
        if err.cell is not None:
            err.cell = tuple(cells[err.cell])
        raise
    shape = (amplitudes.size,) * n
    payload = {"device": template.config_dict(), "amplitudes": amplitudes.tolist(),
               "seed": int(seed), "reset_voltage": reset_voltage,
               "durations": [reset_duration, set_duration, read_duration],
               "drain_voltage": drain_voltage}
    digest = hashlib.sha256(json.dumps(payload, sort_keys=True, default=str)
                            .encode()).hexdigest()
    return SweepResult(amplitudes=amplitudes, n_gates=n,
                       i_d=out.read_current.reshape(shape),
                       phi_f=out.read_phi.reshape(shape), seed=int(seed),
                       params_hash=digest, max_rel_residual=out.max_rel_residual)


def threshold_shift_analysis(result: SweepResult, criterion: float, *,
                             sweep_gate: int = 0, fixed: dict | None = None):
    """Turn-on voltage of the swept gate for each combination of the others.

    Returns records {"others": {gate: amplitude}, "turn_on": V or None};
    None marks curves that never cross the current criterion.
    """
    amps = result.amplitudes
    n = result.n_gates
    other_gates = [g for g in range(n) if g != sweep_gate]
    records = []
    for combo in itertools.product(range(amps.size), repeat=n - 1):
        others = {g: float(amps[i]) for g, i in zip(other_gates, combo)}
        if fixed is not None and any(abs(others[g] - v) > 1e-12 for g, v in fixed.items()):
            continue
        idx = [slice(None)] * n
        for g, i in zip(other_gates, combo):
            idx[g] = i
        curve = result.i_d[tuple(idx)]
        above = np.flatnonzero(curve >= criterion)
        turn_on = float(amps[above[0]]) if above.size else None
        records.append({"others": others, "turn_on": turn_on})
    return records
