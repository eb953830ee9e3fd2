"""Panel Gauss-Legendre quadrature with error estimates and a subtracted
principal-value rule.

All routines call the integrand vectorized on a flat array of nodes, so the
cost is dominated by the integrand itself (typically a table interpolation).
"""

import math

import numpy as np

from geonresp.errors import QuadratureError, PVWindowError

DEFAULT_ORDER = 16
MAX_REFINE = 8


def _panel_nodes(edges, order):
    """Gauss-Legendre nodes/weights mapped onto consecutive panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    a = edges[:-1]
    half = 0.5 * (edges[1:] - a)
    nodes = a[:, None] + half[:, None] * (x[None, :] + 1.0)
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel(), nodes.shape


def _eval_panels(f, edges, order):
    nodes, weights, shape = _panel_nodes(edges, order)
    vals = np.asarray(f(nodes), dtype=np.float64)
    return (vals * weights).reshape(shape).sum(axis=1)


def oscillation_edges(a, b, osc_rate, min_panels=1, order=DEFAULT_ORDER):
    """Panel edges on [a, b] sized so each oscillation period of angular
    rate `osc_rate` gets at least ~2*order quadrature nodes."""
    width = b - a
    if osc_rate and osc_rate > 0.0:
        period = 2.0 * math.pi / osc_rate
        n = max(min_panels, int(math.ceil(2.0 * width / period)))
    else:
        n = min_panels
    return np.linspace(a, b, n + 1)


def panel_integrate(f, edges, order=DEFAULT_ORDER, rel_tol=1e-9, abs_tol=1e-18,
                    raise_on_fail=True):
    """Integrate f over the panels defined by `edges`.

    Error is estimated by comparing two Gauss orders; panels whose estimate
    exceeds the (proportionally shared) budget are bisected, up to
    MAX_REFINE rounds.  Returns (value, err_estimate).
    """
    edges = np.asarray(edges, dtype=np.float64)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0.0):
        raise QuadratureError("panel edges must be strictly increasing")
    for attempt in range(MAX_REFINE + 1):
        lo = _eval_panels(f, edges, order)
        hi = _eval_panels(f, edges, order + 6)
        errs = np.abs(hi - lo)
        value = float(hi.sum())
        err = float(errs.sum())
        budget = max(rel_tol * abs(value), abs_tol)
        if err <= budget or attempt == MAX_REFINE:
            break
        # bisect the offending panels (deterministic, keeps others intact)
        per_panel = budget / len(errs)
        bad = errs > per_panel
        if not bad.any():
            bad = errs == errs.max()
        new_edges = []
        for i in range(len(edges) - 1):
            new_edges.append(edges[i])
            if bad[i]:
                new_edges.append(0.5 * (edges[i] + edges[i + 1]))
        new_edges.append(edges[-1])
        edges = np.array(new_edges)
    if err > max(rel_tol * abs(value), abs_tol) and raise_on_fail:
        raise QuadratureError(
            f"quadrature stalled at error {err:.3e} "
            f"(value {value:.6e}, requested rel {rel_tol:.1e} / abs {abs_tol:.1e})"
        )
    return value, err


def pv_integral(g, s, a, b, window=None, osc_rate=None, order=DEFAULT_ORDER,
                rel_tol=1e-9, abs_tol=1e-18):
    """Cauchy principal value of integral_a^b g(x)/(x - s) dx.

    A symmetric window [s-h, s+h] around the pole is handled with the
    subtracted integrand (g(x) - g(s))/(x - s), whose pole term integrates
    to exactly zero over the symmetric window; the remainder is regular
    panel quadrature.  Returns (value, err_estimate).
    """
    if not a < s < b:
        raise PVWindowError(f"pole s = {s} not interior to [{a}, {b}]")
    h = window if window is not None else min(0.1, 0.5 * abs(s))
    h = min(h, 0.5 * (b - s))
    if s - h <= a:
        raise PVWindowError(
            f"pole s = {s} within window {h:.3e} of lower endpoint {a}"
        )
    gs = float(g(np.array([s]))[0])

    def subtracted(x):
        return (np.asarray(g(x)) - gs) / (x - s)

    def plain(x):
        return np.asarray(g(x)) / (x - s)

    val_mid, err_mid = panel_integrate(
        subtracted, np.array([s - h, s, s + h]), order, rel_tol, abs_tol)
    value = val_mid
    err = err_mid
    if s - h > a:
        v, e = panel_integrate(plain, oscillation_edges(a, s - h, osc_rate),
                               order, rel_tol, abs_tol)
        value += v
        err += e
    if b > s + h:
        v, e = panel_integrate(plain, oscillation_edges(s + h, b, osc_rate),
                               order, rel_tol, abs_tol)
        value += v
        err += e
    return value, err
