"""Sudden-switching transition rates for a static detector.

The detector is switched on in the far past and read at proper time tau0
after the two exterior images become correlated.  The black-hole rate is a
pure mode sum at the detector-frame gap; the geon correction adds a
principal-value frequency integral that vanishes identically at tau0 = 0.

Sign convention: Omega > 0 is excitation, Omega < 0 de-excitation.  Inside
formulas, Omega-tilde = Omega * sqrt(f(r)) is the Killing-frame gap, and the
mode amplitudes are always evaluated at Killing frequency |Omega-tilde|.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from geonresp.errors import DomainError, TableRangeError
from geonresp.quadrature import pv_integral
from geonresp.response import Vacuum
from geonresp.spacetime import redshift

# Richardson extrapolation offsets for the Omega = 0 limit
_ZERO_GAP_OFFSETS = (1e-2, 5e-3, 2.5e-3)
_FOURPI = 4.0 * math.pi


@dataclass
class RateResult:
    """One evaluated transition-rate point."""

    Omega: float
    Omega_tilde: float
    r: float
    tau0: float
    vacuum: Vacuum
    rate: float
    delta_term: float = 0.0
    pv_term: float = 0.0
    pv_err: float = 0.0
    pv_singularity: float = 0.0
    per_l: dict = field(default_factory=dict)
    status: str = "ok"


def _thermal_rate_factor(x):
    """1 / (8 pi x (e^{4 pi x} - 1)), stable for small and negative x.

    This is e^{-2 pi x} / (16 pi x sinh(2 pi x)) without cancellation; the
    ratio at +-x is exactly e^{-4 pi x} in floating point up to rounding,
    which is what makes detailed balance hold to near machine precision.
    """
    return 1.0 / (8.0 * math.pi * x * math.expm1(_FOURPI * x))


def _geon_rate_factor(x):
    """1 / (16 pi x sinh(2 pi x)); even in x, positive."""
    return 1.0 / (16.0 * math.pi * x * math.sinh(2.0 * math.pi * x))


def _amplitudes(table, om):
    in2 = np.empty(table.l_max + 1)
    up2 = np.empty(table.l_max + 1)
    for l in range(table.l_max + 1):
        in2[l], up2[l] = table.interpolate(l, om)
    return in2, up2


def _check_r(table, r):
    if table.r_det != r:
        raise DomainError(f"table built at r = {table.r_det}, requested r = {r}")


def rate_BH(Omega, r, vacuum, table, full=False):
    """Black-hole transition rate at detector-frame gap Omega.

    Omega = 0 is handled by Richardson extrapolation of the Omega -> 0+
    limit; the rate is smooth on each side of zero but carries a linear
    term, so the extrapolation runs over one-sided offsets.
    """
    _check_r(table, r)
    sf = redshift(r)
    if Omega == 0.0:
        return _zero_gap_limit(lambda w: rate_BH(w, r, vacuum, table),
                               r, 0.0, vacuum, full)
    omt = Omega * sf
    om = abs(omt)
    in2, up2 = _amplitudes(table, om)
    ell = np.arange(table.l_max + 1)
    weight = 2 * ell + 1
    if vacuum is Vacuum.HARTLE_HAWKING:
        terms = weight * _thermal_rate_factor(omt) * (in2 + up2)
    elif vacuum is Vacuum.UNRUH:
        terms = weight * _thermal_rate_factor(omt) * up2
        if Omega < 0.0:
            terms = terms + weight * in2 / (8.0 * math.pi * om)
    elif vacuum is Vacuum.BOULWARE:
        if Omega > 0.0:
            terms = np.zeros_like(in2)
        else:
            terms = weight * (in2 + up2) / (8.0 * math.pi * om)
    else:
        raise DomainError(f"unknown vacuum {vacuum}")
    rate = float(terms.sum())
    if full:
        return RateResult(Omega=Omega, Omega_tilde=omt, r=r, tau0=0.0,
                          vacuum=vacuum, rate=rate,
                          per_l={int(l): float(t) for l, t in zip(ell, terms)})
    return rate


def rate_J(Omega, r, tau0, vacuum, table, full=False):
    """Geon correction to the transition rate at switch-off time tau0.

    Sum of a sharp (delta-function) term at the gap frequency and a
    principal-value integral over detector-frame frequency; the latter is
    identically zero at tau0 = 0 and is returned as exactly 0.0 there.
    """
    _check_r(table, r)
    if vacuum not in (Vacuum.HARTLE_HAWKING, Vacuum.UNRUH):
        raise DomainError(
            f"geon rate is defined for Hartle-Hawking and Unruh vacua, got {vacuum}"
        )
    sf = redshift(r)
    if Omega == 0.0:
        return _zero_gap_limit(lambda w: rate_J(w, r, tau0, vacuum, table),
                               r, tau0, vacuum, full)
    omt = Omega * sf
    om = abs(omt)
    in2, up2 = _amplitudes(table, om)
    ell = np.arange(table.l_max + 1)
    sign = (-1.0) ** ell
    amp = up2 if vacuum is Vacuum.UNRUH else in2 + up2
    delta_term = float(
        math.cos(2.0 * tau0 * Omega) * _geon_rate_factor(omt)
        * (sign * (2 * ell + 1) * amp).sum()
    )

    pv_term = 0.0
    pv_err = 0.0
    s = abs(Omega)  # singularity in detector-frame frequency
    if tau0 != 0.0:
        omt_min = table.grid.omega_min / sf
        omt_max = table.grid.omega_max / sf

        def g(omt_arr):
            om_arr = omt_arr * sf
            total = np.zeros_like(omt_arr)
            for l in range(table.l_max + 1):
                i2, u2 = table.interpolate(l, om_arr)
                a = u2 if vacuum is Vacuum.UNRUH else i2 + u2
                total += (-1.0) ** l * (2 * l + 1) * a / (
                    16.0 * math.pi * om_arr * np.sinh(2.0 * math.pi * om_arr))
            return (total * 2.0 * omt_arr * np.sin(2.0 * tau0 * omt_arr)
                    / (math.pi * (omt_arr + s)))

        pv_term, pv_err = pv_integral(g, s, omt_min, omt_max,
                                      osc_rate=2.0 * abs(tau0),
                                      rel_tol=1e-8, abs_tol=1e-16)
    rate = delta_term + pv_term
    if full:
        return RateResult(Omega=Omega, Omega_tilde=omt, r=r, tau0=tau0,
                          vacuum=vacuum, rate=rate, delta_term=delta_term,
                          pv_term=pv_term, pv_err=pv_err, pv_singularity=s)
    return rate


def _zero_gap_limit(fn, r, tau0, vacuum, full):
    """Richardson extrapolation of fn(Omega) to Omega = 0.

    The rates are smooth in Omega through zero but not even (detailed
    balance gives a linear term), so Neville extrapolation is polynomial in
    Omega over the fixed offsets; three points remove the linear and
    quadratic terms.
    """
    xs = np.array(_ZERO_GAP_OFFSETS)
    ys = np.array([_as_value(fn(w)) for w in _ZERO_GAP_OFFSETS])
    # Neville tableau at x = 0
    for k in range(1, len(xs)):
        ys[: len(xs) - k] = (
            (0.0 - xs[k:]) * ys[: len(xs) - k]
            - (0.0 - xs[: len(xs) - k]) * ys[1: len(xs) - k + 1]
        ) / (xs[: len(xs) - k] - xs[k:])
    rate = float(ys[0])
    if full:
        return RateResult(Omega=0.0, Omega_tilde=0.0, r=r, tau0=tau0,
                          vacuum=vacuum, rate=rate,
                          status="extrapolated to zero gap")
    return rate


def _as_value(result):
    return result.rate if isinstance(result, RateResult) else float(result)
