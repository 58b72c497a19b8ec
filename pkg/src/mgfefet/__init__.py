"""Multi-gate FeFET dendritic neuron co-simulation.

Layers of the stack:

- `ferrodomain`: stochastic multi-domain polarization switching
- `fet`: transistor I-V and regime-dependent gate C-V
- `device`: self-consistent floating-gate transients and sweeps
- `dnet`: dendritic deep network training and device-in-the-loop inference
- `harness`: configuration, experiment presets, CLI entry point
"""

from .ferrodomain import (FerroCap, SwitchingParams, hysteresis_sweep,
                          polarization, sample_activation_fields, step,
                          switching_time_constant, triangular_waveform)
from .fet import FetParams, drain_current, mos_capacitance
from .device import (MultiGateDevice, ProgramTrace, PulseProgram, SweepResult,
                     run_program, solve_floating_gate, standard_program,
                     sweep_grid, threshold_shift_analysis)
from .errors import ConfigError, SolverError, TrainingError

__version__ = "0.1.0"

__all__ = [
    "FerroCap", "SwitchingParams", "hysteresis_sweep", "polarization",
    "sample_activation_fields", "step", "switching_time_constant",
    "triangular_waveform", "FetParams", "drain_current", "mos_capacitance",
    "MultiGateDevice", "ProgramTrace", "PulseProgram", "SweepResult",
    "run_program", "solve_floating_gate", "standard_program", "sweep_grid",
    "threshold_shift_analysis", "ConfigError", "SolverError", "TrainingError",
]
