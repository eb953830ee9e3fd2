"""Schwarzschild radial scattering modes for one (l, omega).

Solves, in units 2M = 1,

    d^2 R / dr*^2 + [omega^2 - f(r) (l(l+1)/r^2 + 1/r^3)] R = 0,

bridging a horizon-side series solution (Jaffe expansion, exactly
e^{-i omega r*}-normalized as r -> 1) and a far-field asymptotic solution
(e^{+i omega r*}-normalized) by adaptive ODE integration, then reading off
the "in"/"up" scattering coefficients from 2x2 Wronskian decompositions.

The far-field basis is an asymptotic series derived for this radial
equation itself (the Coulomb expansion of order nu_a is its two leading
orders); :func:`coulomb_H_plus` implements the plain Coulomb wavefunction
for cross-checks and for the phase-shift bookkeeping of
:class:`CoulombAsymptotic`.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dc
from scipy.special import loggamma

from geonresp.errors import (
    ConvergenceError,
    DomainError,
    IntegrationError,
    PrecisionError,
    UnitarityError,
)

# Matching radii: the Jaffe series converges geometrically with ratio
# (r-1)/r = 1/3 at R_NEAR; R_FAR is chosen per-mode in solve_modes.
R_NEAR_DEFAULT = 1.5
R_NEAR_MAX = 2.5

SERIES_TOL = 1e-12
FARFIELD_TOL = 1e-11
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12
UNITARITY_FAIL = 1e-4


# ---------------------------------------------------------------------------
#  Special functions
# ---------------------------------------------------------------------------

def complex_log_gamma(z):
    """Principal-branch log Gamma(z); the phase of Gamma is the imaginary part.

    Raises at the poles z = 0, -1, -2, ...
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise DomainError(f"log Gamma pole at z = {z}")
    return complex(loggamma(z))


def coulomb_nu(l, omega):
    """Complex order nu_a = (-1 + sqrt((2l+1)^2 - 12 omega^2))/2 (principal root)."""
    disc = complex((2 * l + 1) ** 2 - 12.0 * omega * omega)
    return (-1.0 + np.sqrt(disc)) / 2.0


def coulomb_sigma(nu, eta):
    """Coulomb phase shift sigma_nu(eta) = ph Gamma(nu + 1 + i eta).

    For complex order the symmetric combination
    (log Gamma(nu+1+i eta) - log Gamma(nu+1-i eta)) / 2i is used; it reduces
    to the phase of Gamma for real nu.
    """
    nu = complex(nu)
    return (complex_log_gamma(nu + 1.0 + 1j * eta)
            - complex_log_gamma(nu + 1.0 - 1j * eta)) / 2j


def coulomb_H_plus(nu, eta, rho, tol=1e-10):
    """Outgoing Coulomb wavefunction H+_nu(eta, rho) and its rho-derivative.

    Evaluates the asymptotic series e^{i Theta} sum_k (a)_k (b)_k / (k! (2 i rho)^k)
    with a = nu + 1 + i eta, b = -nu + i eta, truncated at its smallest term.
    Raises PrecisionError if the smallest term exceeds tol (rho too small).

    Returns (H, dH/drho, achieved_term).
    """
    nu = complex(nu)
    a = nu + 1.0 + 1j * eta
    b = -nu + 1j * eta
    s = 1.0 + 0.0j       # series sum
    sp = 0.0 + 0.0j      # d(sum)/drho
    term = 1.0 + 0.0j
    best = abs(term)
    k = 0
    while k < 200:
        nxt = term * (a + k) * (b + k) / ((k + 1) * (2j * rho))
        if abs(nxt) >= abs(term) or abs(term) < tol:
            break
        term = nxt
        k += 1
        s += term
        sp += -k * term / rho
        best = abs(term)
    if best > tol:
        raise PrecisionError(
            f"Coulomb asymptotic series floor {best:.2e} > tol {tol:.2e} at rho = {rho}"
        )
    theta = rho - eta * math.log(2.0 * rho) - nu * math.pi / 2.0 + coulomb_sigma(nu, eta)
    phase = np.exp(1j * theta)
    H = phase * s
    dH = phase * (1j * (1.0 - eta / rho) * s + sp)
    return H, dH, best


@dataclass(frozen=True)
class CoulombAsymptotic:
    """Order, Coulomb parameter, and phase shift of the far-field expansion."""

    l: int
    omega: float

    @property
    def nu(self):
        return coulomb_nu(self.l, self.omega)

    @property
    def eta(self):
        return -self.omega

    @property
    def theta(self):
        """Phase shift theta_{omega l} = omega ln(2 omega) - pi nu/2 - ph Gamma(nu+1-i omega)."""
        om = self.omega
        nu = self.nu
        # symmetric combination; reduces to ph Gamma(nu+1-i omega) for real nu
        ph = (complex_log_gamma(nu + 1.0 - 1j * om)
              - complex_log_gamma(nu + 1.0 + 1j * om)) / 2j
        return om * math.log(2.0 * om) - math.pi * nu / 2.0 - ph


# ---------------------------------------------------------------------------
#  Jaffe horizon-side series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JaffeSeries:
    """Coefficients of e^{-i omega r}(r-1)^{-i omega} sum a_n ((r-1)/r)^n."""

    l: int
    omega: float
    coeffs: np.ndarray  # complex, a_0 .. a_N
    tol: float

    @property
    def order(self):
        return len(self.coeffs) - 1

    def recurrence_residual(self):
        """Max residual of the three-term recurrence over interior n."""
        a = self.coeffs
        l, om = self.l, self.omega
        worst = 0.0
        for n in range(self.order):
            prev = a[n - 1] if n >= 1 else 0.0
            res = abs((1 + n) * (1 + n - 2j * om) * a[n + 1]
                      + (-1 - l * (l + 1) - 2 * n * (1 + n)) * a[n]
                      + n * n * prev)
            worst = max(worst, res)
        return worst / max(1.0, np.abs(a).max())


def jaffe_coefficients(l, omega, tol=SERIES_TOL, r_eval=R_NEAR_DEFAULT, n_cap=10000):
    """Generate Jaffe coefficients a_0..a_N by the three-term recurrence.

    Truncates at the first N where the tail bound |a_N x^N| (x evaluated at
    r_eval) stays below tol for several consecutive terms.
    """
    if l < 0 or int(l) != l:
        raise DomainError(f"l must be a non-negative integer, got {l}")
    if not omega > 0.0:
        raise DomainError(f"omega must be > 0, got {omega}")
    x = (r_eval - 1.0) / r_eval
    coeffs = [1.0 + 0.0j]
    a_prev = 0.0 + 0.0j  # a_{-1}
    a_cur = 1.0 + 0.0j   # a_0
    quiet = 0
    xn = 1.0
    for n in range(n_cap):
        a_next = (((1.0 + l * (l + 1) + 2.0 * n * (1.0 + n)) * a_cur
                   - n * n * a_prev)
                  / ((1.0 + n) * (1.0 + n - 2j * omega)))
        coeffs.append(a_next)
        a_prev, a_cur = a_cur, a_next
        xn *= x
        quiet = quiet + 1 if abs(a_next) * xn * x < tol else 0
        if quiet >= 4:
            break
    else:
        raise ConvergenceError(
            f"Jaffe series not converged after {n_cap} terms (l={l}, omega={omega})"
        )
    return JaffeSeries(l=l, omega=omega, coeffs=np.asarray(coeffs), tol=tol)


def jaffe_eval(series, r):
    """Evaluate the Jaffe solution: returns (R, dR/dr*) at radius r.

    Valid close to the horizon (1 < r <= R_NEAR_MAX); raises ConvergenceError
    if the truncated tail is not below the series tolerance at this radius.
    """
    if not 1.0 < r <= R_NEAR_MAX:
        raise DomainError(f"Jaffe evaluation requires 1 < r <= {R_NEAR_MAX}, got {r}")
    om = series.omega
    a = series.coeffs
    x = (r - 1.0) / r
    # tail bound at this radius
    if abs(a[-1]) * x ** series.order > series.tol * max(1.0, abs(a[0])):
        raise ConvergenceError(
            f"Jaffe tail bound {abs(a[-1]) * x ** series.order:.2e} exceeds "
            f"tol {series.tol:.2e} at r = {r}"
        )
    # Horner for S(x) and S'(x)
    s = 0.0 + 0.0j
    sp = 0.0 + 0.0j
    for n in range(series.order, -1, -1):
        sp = sp * x + (n * a[n] if n > 0 else 0.0)
        s = s * x + a[n]
    sp_nox = 0.0 + 0.0j  # sum n a_n x^{n-1}
    for n in range(series.order, 0, -1):
        sp_nox = sp_nox * x + n * a[n]
    f = 1.0 - 1.0 / r
    pref = cmath.exp(-1j * om * r) * (r - 1.0) ** (-1j * om)
    val = pref * s
    # d/dr: phase factor gives -i omega (1 + 1/(r-1)) = -i omega dr*/dr
    dval_dr = val * (-1j * om) * (1.0 + 1.0 / (r - 1.0)) + pref * sp_nox / (r * r)
    return val, f * dval_dr


# ---------------------------------------------------------------------------
#  Far-field asymptotic series (exact to all orders in 1/r for this ODE)
# ---------------------------------------------------------------------------

def _farfield_h(l, omega, m):
    """1/r^m coefficient of the reduced far-field equation w'' + 2i phi' w' + H w = 0."""
    ll = l * (l + 1.0)
    om2 = omega * omega
    if m == 2:
        return 2.0 * om2 - ll - 1j * omega
    return (m + 1.0) * om2 - ll + (m - 3.0) / 4.0


def farfield_eval(l, omega, r, tol=FARFIELD_TOL, max_terms=80):
    """Outgoing far-field solution normalized to e^{+i omega r*} at infinity.

    Returns (R, dR/dr*, floor) where floor is the smallest-term size of the
    optimally truncated asymptotic series (relative).  Raises PrecisionError
    if the series floor exceeds tol at this radius.
    """
    om = omega
    d = [1.0 + 0.0j]
    # optimal truncation: stop when |d_m r^-m| starts growing
    terms = [1.0 + 0.0j]
    best_idx = 0
    for m in range(1, max_terms):
        num = ((m - 1.0) * m - 2j * om * (m - 1.0)) * d[m - 1]
        for j in range(2, m + 2):
            num += _farfield_h(l, om, j) * d[m + 1 - j]
        d.append(num / (2j * om * m))
        terms.append(d[m] * r ** (-m))
        if abs(terms[m]) < abs(terms[best_idx]):
            best_idx = m
        elif abs(terms[m]) > 10.0 * abs(terms[best_idx]):
            break
    floor = abs(terms[best_idx])
    if floor > tol:
        raise PrecisionError(
            f"far-field series floor {floor:.2e} > tol {tol:.2e} at r = {r} "
            f"(l={l}, omega={omega})"
        )
    w = sum(terms[: best_idx + 1])
    wp = sum(-m * terms[m] / r for m in range(1, best_idx + 1))
    # v = exp(i phi0) w with phi0 = omega (r + ln r) after stripping the
    # constant omega ln(2 omega); this is exactly e^{i omega r*} asymptotically.
    phase = cmath.exp(1j * om * (r + math.log(r)))
    v = phase * w
    vp = phase * (1j * om * (1.0 + 1.0 / r) * w + wp)
    p = math.sqrt(r / (r - 1.0))
    pp = p * (-0.5 / (r * (r - 1.0)))
    f = 1.0 - 1.0 / r
    val = p * v
    dval_drstar = f * (pp * v + p * vp)
    return val, dval_drstar, floor


# ---------------------------------------------------------------------------
#  Adaptive DOP853 integration of the radial equation (numba)
# ---------------------------------------------------------------------------

_A = np.ascontiguousarray(_dc.A[:12, :12])
_B = np.ascontiguousarray(_dc.B)
_C = np.ascontiguousarray(_dc.C[:12])
_E3 = np.ascontiguousarray(_dc.E3)
_E5 = np.ascontiguousarray(_dc.E5)

_OK = 0
_UNDERFLOW = 1
_NONFINITE = 2
_MAXSTEPS = 3


@njit(cache=True)
def _rhs(r, y, ll, om2, vscale, out):
    # y = [Re R, Re dR/dr*, Im R, Im dR/dr*]; independent variable is r
    f = 1.0 - 1.0 / r
    v = vscale * f * (ll / (r * r) + 1.0 / (r * r * r))
    c = (v - om2) / f
    out[0] = y[1] / f
    out[1] = c * y[0]
    out[2] = y[3] / f
    out[3] = c * y[2]


@njit(cache=True)
def _dop853(l, omega, r0, r1, y0, rtol, atol, vscale, A, B, C, E3, E5):
    """Advance y from r0 to r1; returns (y, wronskian_drift, status)."""
    n = 4
    ll = l * (l + 1.0)
    om2 = omega * omega
    y = y0.copy()
    K = np.zeros((13, n))
    f0 = np.zeros(n)
    tmp = np.zeros(n)
    _rhs(r0, y, ll, om2, vscale, f0)

    direction = 1.0 if r1 >= r0 else -1.0
    # initial step: scipy-style heuristic
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d0 += (y[i] / sc) ** 2
        d1 += (f0[i] / sc) ** 2
    d0 = math.sqrt(d0 / n)
    d1 = math.sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h = min(h, abs(r1 - r0))
    for i in range(n):
        tmp[i] = y[i] + h * direction * f0[i]
    _rhs(r0 + h * direction, tmp, ll, om2, vscale, K[0])
    d2 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d2 += ((K[0, i] - f0[i]) / sc) ** 2
    d2 = math.sqrt(d2 / n) / h
    if max(d1, d2) > 1e-15:
        h1 = (0.01 / max(d1, d2)) ** 0.125
        h = min(100.0 * h, h1, abs(r1 - r0))
    h *= direction

    # Wronskian of (R, R*): W = 2i (Im R * Re S - Re R * Im S); drift is
    # measured against max(|W0|, |R||S|) so it stays meaningful where the
    # bilinear cancels through a high centrifugal barrier.
    w0 = y[2] * y[1] - y[0] * y[3]
    drift = 0.0

    r = r0
    nsteps = 0
    while (r1 - r) * direction > 0.0:
        nsteps += 1
        if nsteps > 2_000_000:
            return y, drift, _MAXSTEPS
        if abs(h) < 1e-14 * max(1.0, abs(r)):
            return y, drift, _UNDERFLOW
        if (r + h - r1) * direction > 0.0:
            h = r1 - r
        _rhs(r, y, ll, om2, vscale, K[0])
        for s in range(1, 12):
            for i in range(n):
                acc = 0.0
                for j in range(s):
                    acc += A[s, j] * K[j, i]
                tmp[i] = y[i] + h * acc
            _rhs(r + C[s] * h, tmp, ll, om2, vscale, K[s])
        # 8th-order solution
        ok = True
        for i in range(n):
            acc = 0.0
            for j in range(12):
                acc += B[j] * K[j, i]
            tmp[i] = y[i] + h * acc
            if not math.isfinite(tmp[i]):
                ok = False
        if not ok:
            return y, drift, _NONFINITE
        _rhs(r + h, tmp, ll, om2, vscale, K[12])
        # combined 5th/3rd-order error estimate (Hairer's DOP853 scheme)
        err5 = 0.0
        err3 = 0.0
        for i in range(n):
            sc = atol + rtol * max(abs(y[i]), abs(tmp[i]))
            e5 = 0.0
            e3 = 0.0
            for j in range(13):
                e5 += E5[j] * K[j, i]
                e3 += E3[j] * K[j, i]
            err5 += (e5 / sc) ** 2
            err3 += (e3 / sc) ** 2
        if err5 == 0.0 and err3 == 0.0:
            err_norm = 0.0
        else:
            err_norm = abs(h) * err5 / math.sqrt((err5 + 0.01 * err3) * n)
        if err_norm < 1.0:
            r += h
            for i in range(n):
                y[i] = tmp[i]
            w = y[2] * y[1] - y[0] * y[3]
            mag = math.hypot(y[0], y[2]) * math.hypot(y[1], y[3])
            dd = abs(w - w0) / max(abs(w0), mag)
            if dd > drift:
                drift = dd
            fac = 6.0 if err_norm == 0.0 else 0.9 * err_norm ** -0.125
            h *= min(6.0, max(0.333, fac))
        else:
            h *= max(0.2, 0.9 * err_norm ** -0.125)
    return y, drift, _OK


def _pack(val, deriv):
    return np.array([val.real, deriv.real, val.imag, deriv.imag])


def _unpack(y):
    return complex(y[0], y[2]), complex(y[1], y[3])


def integrate_radial(l, omega, r_from, r_to, init, rtol=ODE_RTOL, atol=ODE_ATOL,
                     include_potential=True):
    """Advance (R, dR/dr*) from r_from to r_to with adaptive error control.

    init is a complex pair (R, dR/dr*).  Returns ((R, dR/dr*), wronskian_drift).
    """
    if not (r_from > 1.0 and r_to > 1.0):
        raise DomainError("integration radii must lie outside the horizon")
    val, deriv = init
    if not (cmath.isfinite(val) and cmath.isfinite(deriv)):
        raise DomainError("initial data must be finite")
    y = _pack(complex(val), complex(deriv))
    vscale = 1.0 if include_potential else 0.0
    yout, drift, status = _dop853(float(l), float(omega), float(r_from), float(r_to),
                                  y, rtol, atol, vscale, _A, _B, _C, _E3, _E5)
    if status == _UNDERFLOW:
        raise IntegrationError(f"step-size underflow at (l={l}, omega={omega})")
    if status == _NONFINITE:
        raise IntegrationError(f"non-finite state encountered at (l={l}, omega={omega})")
    if status == _MAXSTEPS:
        raise IntegrationError(f"step budget exhausted at (l={l}, omega={omega})")
    return _unpack(yout), drift


# ---------------------------------------------------------------------------
#  Mode normalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeSolution:
    """Normalized in/up Boulware mode data for one (l, omega).

    R_in_det / R_up_det are the physical mode values R = Rtilde / r at the
    detector radius.
    """

    l: int
    omega: float
    r_det: float
    A_in: complex
    B_in: complex
    A_up: complex
    B_up: complex
    R_in_det: complex
    R_up_det: complex
    wronskian_drift: float

    @property
    def unitarity_defect_in(self):
        return abs(abs(self.A_in) ** 2 + abs(self.B_in) ** 2 - 1.0)

    @property
    def unitarity_defect_up(self):
        return abs(abs(self.A_up) ** 2 + abs(self.B_up) ** 2 - 1.0)


def _wronskian(a, b):
    """W[a, b] = a b' - a' b for (value, dr*-derivative) pairs."""
    return a[0] * b[1] - a[1] * b[0]


def _decompose(sol, basis_plus, basis_minus, w=None):
    """Coefficients (c_plus, c_minus) of sol in the basis (pair of solutions).

    `w` is the Wronskian W[basis_plus, basis_minus]; pass the analytic value
    when the two basis solutions are much larger than their conserved flux
    (direct evaluation then cancels to zero in floating point).
    """
    if w is None:
        w = _wronskian(basis_plus, basis_minus)
    if w == 0.0:
        raise PrecisionError("basis Wronskian vanished in mode decomposition")
    c_plus = _wronskian(sol, basis_minus) / w
    c_minus = _wronskian(basis_plus, sol) / w
    return c_plus, c_minus


def choose_r_far(l, omega, r_det, base=50.0):
    """Far matching radius: outside the centrifugal turning point and far
    enough that the asymptotic series reaches its tolerance."""
    r_tp = math.sqrt(l * (l + 1.0)) / omega if l > 0 else omega ** (-2.0 / 3.0)
    return max(base, 20.0 / omega, 3.0 * r_tp, 2.0 * r_det)


def solve_modes(l, omega, r_det, r_near=R_NEAR_DEFAULT, rtol=ODE_RTOL, atol=ODE_ATOL,
                series_tol=SERIES_TOL, farfield_tol=FARFIELD_TOL):
    """Solve and normalize the in/up modes at one (l, omega).

    Raises UnitarityError if flux conservation fails beyond 1e-4 on either
    branch (a diagnostic for integration or matching failure).
    """
    if not omega > 0.0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if not r_det > 1.0:
        raise DomainError(f"r_det must be > 1, got {r_det}")
    if not r_near < r_det:
        r_near = min(R_NEAR_DEFAULT, 0.5 * (1.0 + r_det))

    series = jaffe_coefficients(l, omega, tol=series_tol, r_eval=r_near)
    j_near = jaffe_eval(series, r_near)

    r_far = choose_r_far(l, omega, r_det)
    far = None
    for _ in range(4):
        try:
            far = farfield_eval(l, omega, r_far, tol=farfield_tol)
            break
        except PrecisionError:
            r_far *= 2.0
    if far is None:
        raise PrecisionError(
            f"far-field series cannot reach tol {farfield_tol} (l={l}, omega={omega})"
        )
    u_plus_far = (far[0], far[1])

    # in-branch: horizon data outward, decompose on the far basis
    mid_in, drift1 = integrate_radial(l, omega, r_near, r_det, j_near, rtol, atol)
    far_in, drift2 = integrate_radial(l, omega, r_det, r_far, mid_in, rtol, atol)
    u_minus_far = (np.conj(u_plus_far[0]), np.conj(u_plus_far[1]))
    beta, alpha = _decompose(far_in, u_plus_far, u_minus_far)
    B_in = 1.0 / alpha
    A_in = beta / alpha
    R_in_det = mid_in[0] / alpha / r_det

    # up-branch: far data inward, decompose on the horizon (Jaffe) basis
    mid_up, drift3 = integrate_radial(l, omega, r_far, r_det, u_plus_far, rtol, atol)
    near_up, drift4 = integrate_radial(l, omega, r_det, r_near, mid_up, rtol, atol)
    j_conj = (np.conj(j_near[0]), np.conj(j_near[1]))
    # W[conj(j), j] = -2i omega exactly (horizon flux of the unit-normalized
    # pair); the direct product cancels catastrophically at high l, low omega.
    gamma, delta = _decompose(near_up, j_conj, j_near, w=-2.0j * omega)
    B_up = 1.0 / gamma
    A_up = delta / gamma
    R_up_det = mid_up[0] / gamma / r_det

    sol = ModeSolution(
        l=l, omega=omega, r_det=r_det,
        A_in=A_in, B_in=B_in, A_up=A_up, B_up=B_up,
        R_in_det=R_in_det, R_up_det=R_up_det,
        wronskian_drift=max(drift1, drift2, drift3, drift4),
    )
    if sol.unitarity_defect_in > UNITARITY_FAIL or sol.unitarity_defect_up > UNITARITY_FAIL:
        raise UnitarityError(
            f"unitarity defect {sol.unitarity_defect_in:.2e}/{sol.unitarity_defect_up:.2e} "
            f"beyond {UNITARITY_FAIL} at (l={l}, omega={omega})"
        )
    return sol


def amplitude_sq(l, omega, r_det, **kwargs):
    """(|R_in|^2, |R_up|^2) at the detector radius; wraps solve_modes."""
    sol = solve_modes(l, omega, r_det, **kwargs)
    return abs(sol.R_in_det) ** 2, abs(sol.R_up_det) ** 2
