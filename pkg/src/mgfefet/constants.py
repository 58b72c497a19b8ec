"""Physical constants and unit helpers shared across the device stack.

Device parameters are quoted in the units practitioners use (MV/cm for
fields, uC/cm^2 for polarization, nm for thicknesses, cm^2 for areas);
charge-balance arithmetic runs in SI.  Conversions happen once at module
boundaries.
"""

import math

EPS0 = 8.8541878128e-12  # vacuum permittivity, F/m
Q_E = 1.602176634e-19    # elementary charge, C
K_B = 1.380649e-23       # Boltzmann constant, J/K

EPS_SI = 11.7            # silicon relative permittivity
NI_SI_CM3 = 1.0e10       # silicon intrinsic carrier density at 300 K, cm^-3

CM2_TO_M2 = 1.0e-4
NM_TO_M = 1.0e-9
UC_CM2_TO_C_M2 = 1.0e-2
MV_CM_TO_V_M = 1.0e8


def thermal_voltage(temperature: float) -> float:
    """kT/q in volts."""
    return K_B * temperature / Q_E


def field_mv_cm(voltage: float, thickness_nm: float):
    """Field across a film of the given thickness, in MV/cm.

    1 V across 10 nm is exactly 1 MV/cm.
    """
    return voltage / thickness_nm * 10.0


LN10 = math.log(10.0)
