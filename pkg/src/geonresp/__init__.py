"""Detector response outside a Schwarzschild black hole vs. the RP3 geon.

Computes normalized "in"/"up" radial scattering modes, caches their
amplitudes on a frequency grid, and evaluates Gaussian-switching response
functions and sudden-switching transition rates for the Hartle-Hawking,
Unruh, and Boulware vacua.  Geometrized units with 2M = 1 throughout.
"""

from geonresp.spacetime import (
    redshift,
    tortoise,
    inverse_tortoise,
    local_frequency,
    killing_frequency,
    local_temperature,
    T_HAWKING,
)
from geonresp.radial_modes import solve_modes, amplitude_sq, ModeSolution
from geonresp.mode_table import FrequencyGrid, ModeTable, build_table
from geonresp.response import (
    SwitchingProfile,
    Vacuum,
    ResponseResult,
    response_BH,
    response_J,
    response_J_translated,
    sweep,
)
from geonresp.rates import RateResult, rate_BH, rate_J, pv_integral

__version__ = "0.1.0"
