"""Gaussian-switching detector response functions.

A static Unruh-DeWitt detector with gap Omega (proper/local frame) is
switched with a Gaussian window chi(tau) = exp(-tau^2 / 2 sigma^2), Fourier
convention chi_hat(w) = (1/sqrt(2 pi)) int e^{-i w tau} chi dtau =
sigma e^{-sigma^2 w^2 / 2}; a translation by tau0 multiplies chi_hat by a
pure phase.  The response splits into a black-hole part F_BH and a
geon-image part F_J; the total excitation probability is proportional to
F_BH + F_J.

Frequency frames: omega denotes Killing-frame frequency (mode-table axis);
omega-tilde = omega / sqrt(f(r)) is the detector-frame frequency the
switching function actually filters.  Thermal factors use omega, Gaussians
use omega-tilde.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from geonresp.errors import DomainError, PrecisionError, QuadratureError
from geonresp.quadrature import panel_integrate
from geonresp.spacetime import redshift

RESPONSE_REL_TOL = 1e-6
RESPONSE_ABS_TOL = 1e-20
GAUSS_TAIL = 40.0       # integrate to |Omega| + GAUSS_TAIL/sigma (e^-1600 tail)
MAX_TAU0_SIGMA = 10.0   # oscillation budget: |tau0| <= 10 sigma
_FOURPI = 4.0 * math.pi


class Vacuum(enum.Enum):
    """Stationary vacuum state of the field."""

    HARTLE_HAWKING = "hartle-hawking"
    UNRUH = "unruh"
    BOULWARE = "boulware"


@dataclass(frozen=True)
class SwitchingProfile:
    """Gaussian switching window: proper-time width sigma, center tau0."""

    sigma: float
    tau0: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError(f"switching width must be positive, got {self.sigma}")


@dataclass
class ResponseResult:
    """One evaluated response point, CSV-ready."""

    Omega: float
    r: float
    sigma: float
    tau0: float
    vacuum: Vacuum
    F_BH: float
    F_J: float
    F_total: float
    err_BH: float
    err_J: float
    per_l_BH: dict = field(default_factory=dict)
    per_l_J: dict = field(default_factory=dict)
    status: str = "ok"


def _check_vacuum(vacuum):
    if vacuum not in (Vacuum.HARTLE_HAWKING, Vacuum.UNRUH):
        raise DomainError(
            "Gaussian response functions are defined for the Hartle-Hawking "
            f"and Unruh vacua only, got {vacuum}"
        )


IR_TAIL_PANELS = 16
IR_TAIL_FLOOR = 1e-8   # tail extends down to omega_min * IR_TAIL_FLOOR


def _tail_amplitudes(table, l, om):
    """(|R_in|^2, |R_up|^2) at Killing frequency om, extended below the grid.

    Inside the grid this is the table interpolation.  Below the grid floor
    the amplitudes follow the power law fitted to the two lowest nodes
    (|R|^2 ~ omega^{2l+2} asymptotics, with the local slope capturing the
    subleading correction); the integrands are finite there, so this
    completes the otherwise first-order infrared cutoff error.
    """
    om = np.asarray(om, dtype=np.float64)
    om_lo = table.grid.omega_min
    inside = om >= om_lo
    in2 = np.empty_like(om)
    up2 = np.empty_like(om)
    if inside.any():
        a, b = table.interpolate(l, om[inside])
        in2[inside] = a
        up2[inside] = b
    if (~inside).any():
        o1, o2 = table.omegas[0], table.omegas[1]
        ratio = om[~inside] / o1
        for branch, out in ((0, in2), (1, up2)):
            v1 = table.values[l, 0, branch]
            v2 = table.values[l, 1, branch]
            if v1 <= 0.0 or v2 <= 0.0:
                out[~inside] = 0.0
                continue
            p = math.log(v2 / v1) / math.log(o2 / o1)
            p = min(max(p, 0.0), 60.0)
            out[~inside] = v1 * ratio ** p
    return in2, up2


def _edges(table, sf, Omega, sigma, tau0):
    """Panel edges in detector-frame frequency omega-tilde.

    Uses the table's own nodes (mapped by 1/sqrt(f)) so panels follow the
    grid's log/linear structure, prepends log-spaced panels covering the
    infrared tail below the grid floor, truncates where every Gaussian
    weight is below the e^{-GAUSS_TAIL^2} tail, and subdivides so the
    cos(2 w tau0) oscillation gets at least ~2 panels per period.
    """
    omt_min = table.grid.omega_min / sf
    omt_max = table.grid.omega_max / sf
    cut = min(omt_max, max(abs(Omega) + GAUSS_TAIL / sigma, 2.0 * omt_min))
    nodes = table.omegas / sf
    edges = list(np.geomspace(omt_min * IR_TAIL_FLOOR, omt_min,
                              IR_TAIL_PANELS + 1)[:-1])
    edges.append(omt_min)
    edges.extend(nodes[(nodes > omt_min) & (nodes < cut)])
    edges.append(cut)
    edges = np.array(edges)
    if tau0 != 0.0:
        w_max = 0.5 * math.pi / abs(tau0)  # half a period of cos(2 w tau0)
        out = []
        for i in range(len(edges) - 1):
            n_sub = max(1, int(math.ceil((edges[i + 1] - edges[i]) / w_max)))
            out.append(np.linspace(edges[i], edges[i + 1], n_sub + 1)[:-1])
        edges = np.concatenate(out + [edges[-1:]])
    return edges


def _weights_bh(omt, sf, l, Omega, sigma, vacuum):
    """(in-weight, up-weight) of the F_BH integrand at omega-tilde array."""
    om = omt * sf
    pref = (2 * l + 1) * sigma / (8.0 * math.pi * om)
    denom = -np.expm1(-_FOURPI * om)
    g_minus = np.exp(-_FOURPI * om - (sigma * (omt - Omega)) ** 2)
    g_plus = np.exp(-((sigma * (omt + Omega)) ** 2))
    thermal = pref * (g_minus + g_plus) / denom
    if vacuum is Vacuum.HARTLE_HAWKING:
        return thermal, thermal
    # Unruh: up-sector keeps the thermal weight, in-sector is the plain
    # detector-frame Gaussian with no thermal factor.
    w_in = pref * np.exp(-((sigma * (omt - Omega)) ** 2))
    return w_in, thermal


def _weight_j(omt, sf, l, Omega, sigma, tau0):
    """Common geon-part weight (applies to both in and up amplitudes)."""
    om = omt * sf
    pref = (-1.0) ** l * (2 * l + 1) * sigma / (8.0 * math.pi * om)
    denom = -np.expm1(-_FOURPI * om)
    w = pref * 2.0 * np.exp(
        -2.0 * math.pi * om - (sigma * omt) ** 2 - (sigma * Omega) ** 2
    ) / denom
    if tau0 != 0.0:
        w = w * np.cos(2.0 * omt * tau0)
    return w


def _integrate_branches(table, edges, sf, l, weight_fn):
    """Quadrature of weight(omt) * |R|^2 for the in and up branches."""

    def in_part(omt):
        in2, _ = _tail_amplitudes(table, l, omt * sf)
        return weight_fn(omt) * in2

    def up_part(omt):
        _, up2 = _tail_amplitudes(table, l, omt * sf)
        return weight_fn(omt) * up2

    v_in, e_in = panel_integrate(in_part, edges, rel_tol=RESPONSE_REL_TOL,
                                 abs_tol=RESPONSE_ABS_TOL, raise_on_fail=False)
    v_up, e_up = panel_integrate(up_part, edges, rel_tol=RESPONSE_REL_TOL,
                                 abs_tol=RESPONSE_ABS_TOL, raise_on_fail=False)
    return v_in, v_up, e_in + e_up


def _check_tol(value, err, what):
    if err > max(RESPONSE_REL_TOL * abs(value), RESPONSE_ABS_TOL):
        raise QuadratureError(
            f"{what} quadrature reached error {err:.3e} on value {value:.6e}, "
            f"above relative tolerance {RESPONSE_REL_TOL:.1e}"
        )


def response_BH(Omega, r, sigma, vacuum, table, full=False):
    """Black-hole part of the Gaussian-switching response.

    Independent of tau0 (only |chi_hat|^2 enters).  Integrates the per-l
    thermal integrand over detector-frame frequency from the table's mapped
    infrared cutoff, summing l up to the table's l_max.
    """
    _check_vacuum(vacuum)
    if table.r_det != r:
        raise DomainError(f"table built at r = {table.r_det}, requested r = {r}")
    SwitchingProfile(sigma)
    sf = redshift(r)
    edges = _edges(table, sf, Omega, sigma, 0.0)
    total = 0.0
    err = 0.0
    per_l = {}
    per_l_in = {}
    for l in range(table.l_max + 1):
        def w_in(omt, l=l):
            return _weights_bh(omt, sf, l, Omega, sigma, vacuum)[0]

        def w_up(omt, l=l):
            return _weights_bh(omt, sf, l, Omega, sigma, vacuum)[1]

        def in_part(omt, l=l):
            in2, _ = _tail_amplitudes(table, l, omt * sf)
            return w_in(omt) * in2

        def up_part(omt, l=l):
            _, up2 = _tail_amplitudes(table, l, omt * sf)
            return w_up(omt) * up2

        v_in, e_in = panel_integrate(in_part, edges, rel_tol=RESPONSE_REL_TOL,
                                     abs_tol=RESPONSE_ABS_TOL, raise_on_fail=False)
        v_up, e_up = panel_integrate(up_part, edges, rel_tol=RESPONSE_REL_TOL,
                                     abs_tol=RESPONSE_ABS_TOL, raise_on_fail=False)
        per_l[l] = v_in + v_up
        per_l_in[l] = v_in
        total += v_in + v_up
        err += e_in + e_up
    _check_tol(total, err, "F_BH")
    if full:
        return total, err, per_l, per_l_in
    return total


def response_J_translated(Omega, r, sigma, tau0, vacuum, table, full=False):
    """Geon part of the response with the switching window centered at tau0.

    The integrand carries an extra cos(2 omega-tilde tau0) de-phasing factor;
    at tau0 = 0 this is exactly the untranslated geon response.
    """
    _check_vacuum(vacuum)
    if table.r_det != r:
        raise DomainError(f"table built at r = {table.r_det}, requested r = {r}")
    SwitchingProfile(sigma, tau0)
    if abs(tau0) > MAX_TAU0_SIGMA * sigma:
        raise QuadratureError(
            f"|tau0| = {abs(tau0)} exceeds the oscillation budget "
            f"{MAX_TAU0_SIGMA} * sigma = {MAX_TAU0_SIGMA * sigma}"
        )
    sf = redshift(r)
    edges = _edges(table, sf, 0.0, sigma, tau0)
    total = 0.0
    err = 0.0
    per_l = {}
    for l in range(table.l_max + 1):
        def weight(omt, l=l):
            return _weight_j(omt, sf, l, Omega, sigma, tau0)

        v_in, v_up, e = _integrate_branches(table, edges, sf, l, weight)
        if vacuum is Vacuum.UNRUH:
            per_l[l] = v_up
            total += v_up
        else:
            per_l[l] = v_in + v_up
            total += v_in + v_up
        err += e
    _check_tol(total, err, "F_J")
    if full:
        return total, err, per_l
    return total


def response_J(Omega, r, sigma, vacuum, table, full=False):
    """Geon part of the response for a window centered at tau0 = 0."""
    return response_J_translated(Omega, r, sigma, 0.0, vacuum, table, full)


def evaluate_point(Omega, r, sigma, tau0, vacuum, table):
    """F_BH, F_J and their sum at one parameter point, as a ResponseResult."""
    F_BH, err_BH, per_l_BH, _ = response_BH(Omega, r, sigma, vacuum, table,
                                            full=True)
    F_J, err_J, per_l_J = response_J_translated(Omega, r, sigma, tau0, vacuum,
                                                table, full=True)
    F_total = F_BH + F_J
    if F_total < -(err_BH + err_J + 1e-300):
        raise PrecisionError(
            f"total response {F_total:.6e} negative beyond quadrature error"
        )
    return ResponseResult(Omega=Omega, r=r, sigma=sigma, tau0=tau0,
                          vacuum=vacuum, F_BH=F_BH, F_J=F_J, F_total=F_total,
                          err_BH=err_BH, err_J=err_J,
                          per_l_BH=per_l_BH, per_l_J=per_l_J)


SWEEP_KINDS = ("gap", "radius", "sigma", "tau0")


def sweep(kind, values, Omega=0.0, r=3.0, sigma=100.0, tau0=0.0,
          vacuum=Vacuum.HARTLE_HAWKING, table=None, table_provider=None):
    """Evaluate a 1-d parameter sweep; per-point failures are recorded in the
    result's status and the sweep continues.

    `table_provider(r)` must return a ModeTable at radius r; it is required
    for radius sweeps and used as a fallback when `table` is None.
    """
    if kind not in SWEEP_KINDS:
        raise DomainError(f"unknown sweep kind {kind!r}, expected {SWEEP_KINDS}")
    results = []
    for value in values:
        params = {"Omega": Omega, "r": r, "sigma": sigma, "tau0": tau0}
        params[{"gap": "Omega", "radius": "r", "sigma": "sigma",
                "tau0": "tau0"}[kind]] = float(value)
        try:
            if kind == "radius" or table is None:
                if table_provider is None:
                    raise DomainError("radius sweep requires a table_provider")
                tab = table_provider(params["r"])
            else:
                tab = table
            results.append(evaluate_point(params["Omega"], params["r"],
                                          params["sigma"], params["tau0"],
                                          vacuum, tab))
        except Exception as exc:
            results.append(ResponseResult(
                Omega=params["Omega"], r=params["r"], sigma=params["sigma"],
                tau0=params["tau0"], vacuum=vacuum,
                F_BH=math.nan, F_J=math.nan, F_total=math.nan,
                err_BH=math.nan, err_J=math.nan,
                status=f"error: {type(exc).__name__}: {exc}"))
    return results
