"""Coordinates and kinematics for a static detector outside a Schwarzschild
black hole.

Geometrized units with 2M = 1, so the horizon sits at r = 1 and the Hawking
temperature is T_H = 1/(4 pi).  Frequencies are stored in the Killing frame
internally; detector-frame ("local") values are produced only at API
boundaries via :func:`local_frequency` / :func:`killing_frequency`.
"""

import math
from dataclasses import dataclass

from geonresp.errors import DomainError

T_HAWKING = 1.0 / (4.0 * math.pi)


@dataclass(frozen=True)
class GeometryParams:
    """Fixed convention: 2M = 1, r_horizon = 1, T_H = 1/(4 pi)."""

    r_horizon: float = 1.0
    t_hawking: float = T_HAWKING


@dataclass(frozen=True)
class DetectorWorldline:
    """Static detector at areal radius r (units of 2M), at the theta = 0 pole."""

    r: float

    def __post_init__(self):
        _check_exterior(self.r)


def _check_exterior(r):
    if not r > 1.0:
        raise DomainError(f"detector radius must satisfy r > 1 (horizon), got r = {r}")


def metric_f(r):
    """Redshift function f(r) = 1 - 1/r."""
    _check_exterior(r)
    return 1.0 - 1.0 / r


def redshift(r):
    """sqrt(f(r)), the lapse seen by a static observer at radius r."""
    return math.sqrt(metric_f(r))


def tortoise(r):
    """Tortoise coordinate r* = r + ln(r - 1); strictly increasing on r > 1."""
    _check_exterior(r)
    return r + math.log(r - 1.0)


def inverse_tortoise(rstar, tol=1e-13, max_iter=100):
    """Invert r*(r) = rstar by safeguarded Newton iteration.

    Initial guess r ~ rstar for rstar > 2 and r ~ 1 + exp(rstar - 1)
    otherwise; both give quadratic convergence in their regime.
    """
    # iterate in u = r - 1, which stays representable arbitrarily close to
    # the horizon where 1 + u would round to 1
    if rstar > 2.0:
        u = rstar - 1.0
    else:
        u = math.exp(rstar - 1.0)
    for _ in range(max_iter):
        g = 1.0 + u + math.log(u) - rstar
        du = g * u / (1.0 + u)  # g / (dr*/du)
        u_new = u - du
        if u_new <= 0.0:  # safeguard: never cross the horizon
            u_new = 0.5 * u
        u = u_new
        if abs(du) < tol * max(1.0, u):
            break
    return 1.0 + u


def local_frequency(omega, r):
    """Detector-frame frequency of a Killing-frame mode: omega / sqrt(f(r))."""
    if omega < 0.0:
        raise DomainError(f"Killing frequency must be >= 0, got {omega}")
    return omega / redshift(r)


def killing_frequency(omega_local, r):
    """Inverse of :func:`local_frequency`: omega_local * sqrt(f(r))."""
    return omega_local * redshift(r)


def local_temperature(r):
    """Tolman-shifted Hawking temperature T_H / sqrt(f(r))."""
    return T_HAWKING / redshift(r)
