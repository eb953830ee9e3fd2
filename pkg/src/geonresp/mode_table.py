"""Cached grid of mode amplitudes |R_in|^2, |R_up|^2 over (l, omega).

The table is the performance-critical precomputation shared by every
response/rate evaluation: built once per detector radius, persisted in a
self-describing binary container, and interpolated with monotone local
cubics (log-frequency below the grid split, linear above).
"""

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np
from scipy.interpolate import PchipInterpolator

from geonresp.errors import TableError, TableRangeError, DomainError
from geonresp.radial_modes import solve_modes

FORMAT_MAGIC = b"GEONRESP-MODETABLE\n"
FORMAT_VERSION = 1

DEFAULT_OMEGA_MIN = 1e-4
DEFAULT_OMEGA_MAX = 8.0
DEFAULT_NODES = 400
DEFAULT_L_MAX = 10
GRID_SPLIT = 0.1  # log-spaced below, uniform above


@dataclass(frozen=True)
class FrequencyGrid:
    """Log-linear hybrid frequency grid (Killing frame, omega > 0)."""

    omega_min: float = DEFAULT_OMEGA_MIN
    omega_max: float = DEFAULT_OMEGA_MAX
    n_nodes: int = DEFAULT_NODES
    split: float = GRID_SPLIT

    def __post_init__(self):
        if not self.omega_min >= 1e-6:
            raise DomainError(f"omega_min must be >= 1e-6, got {self.omega_min}")
        if not self.omega_min < self.split < self.omega_max:
            raise DomainError("grid requires omega_min < split < omega_max")
        if self.n_nodes < 16:
            raise DomainError("grid needs at least 16 nodes")

    def nodes(self):
        """Strictly increasing nodes; the split point is always a node."""
        n_log = max(8, int(round(0.4 * self.n_nodes)))
        n_lin = self.n_nodes - n_log
        log_part = np.geomspace(self.omega_min, self.split, n_log)
        lin_part = np.linspace(self.split, self.omega_max, n_lin + 1)[1:]
        return np.concatenate([log_part, lin_part])


def _build_params_hash(r_det, l_max, grid):
    payload = json.dumps(
        {"version": FORMAT_VERSION, "r_det": r_det, "l_max": l_max,
         "grid": asdict(grid)},
        sort_keys=True,
    ).encode()
    return hashlib.sha256(payload).hexdigest()


def _solve_entry(args):
    l, omega, r_det = args
    try:
        sol = solve_modes(l, omega, r_det)
        defect = max(sol.unitarity_defect_in, sol.unitarity_defect_up)
        return (abs(sol.R_in_det) ** 2, abs(sol.R_up_det) ** 2,
                defect, sol.wronskian_drift, "")
    except Exception as exc:  # aggregated by the caller
        return (math.nan, math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}")


class ModeTable:
    """Immutable grid of (|R_in|^2, |R_up|^2) at a fixed detector radius."""

    def __init__(self, r_det, l_max, grid, values, defects, drifts, failures=()):
        self.r_det = float(r_det)
        self.l_max = int(l_max)
        self.grid = grid
        self.omegas = grid.nodes()
        self.values = np.asarray(values, dtype=np.float64)   # (l_max+1, n, 2)
        self.defects = np.asarray(defects, dtype=np.float64)
        self.drifts = np.asarray(drifts, dtype=np.float64)
        self.failures = tuple(failures)
        self.params_hash = _build_params_hash(self.r_det, self.l_max, grid)
        for arr in (self.values, self.defects, self.drifts, self.omegas):
            arr.setflags(write=False)
        self._interpolators = {}

    # -- interpolation ------------------------------------------------------

    def _interp(self, l, branch):
        key = (l, branch)
        if key not in self._interpolators:
            om = self.omegas
            vals = self.values[l, :, branch]
            lo = om <= self.grid.split
            hi = om >= self.grid.split
            self._interpolators[key] = (
                PchipInterpolator(np.log(om[lo]), vals[lo], extrapolate=False),
                PchipInterpolator(om[hi], vals[hi], extrapolate=False),
            )
        return self._interpolators[key]

    def interpolate(self, l, omega):
        """(|R_in|^2, |R_up|^2) at (l, omega); exact at grid nodes."""
        if not 0 <= l <= self.l_max:
            raise TableRangeError(f"l = {l} outside table (l_max = {self.l_max})")
        omega = np.asarray(omega, dtype=np.float64)
        if np.any(omega < self.grid.omega_min) or np.any(omega > self.grid.omega_max):
            raise TableRangeError(
                f"omega outside grid range [{self.grid.omega_min}, {self.grid.omega_max}]"
            )
        out = np.empty(omega.shape + (2,))
        for branch in (0, 1):
            f_lo, f_hi = self._interp(l, branch)
            lo = omega <= self.grid.split
            res = np.where(lo,
                           f_lo(np.log(np.maximum(omega, self.grid.omega_min))),
                           f_hi(np.minimum(np.maximum(omega, self.grid.split),
                                           self.grid.omega_max)))
            out[..., branch] = res
        if out.ndim == 1:
            return float(out[0]), float(out[1])
        return out[..., 0], out[..., 1]

    # -- persistence --------------------------------------------------------

    def save(self, path):
        """Write the self-describing binary container (bit-exact round trip)."""
        payload = np.concatenate([
            self.values.ravel(), self.defects.ravel(), self.drifts.ravel(),
        ]).astype("<f8").tobytes()
        header = {
            "format_version": FORMAT_VERSION,
            "r_det": self.r_det,
            "l_max": self.l_max,
            "grid": asdict(self.grid),
            "n_nodes_actual": len(self.omegas),
            "params_hash": self.params_hash,
            "payload_sha256": hashlib.sha256(payload).hexdigest(),
            "failures": list(self.failures),
        }
        head = json.dumps(header, sort_keys=True).encode()
        tmp = f"{path}.tmp.{os.getpid()}"
        with open(tmp, "wb") as fh:
            fh.write(FORMAT_MAGIC)
            fh.write(len(head).to_bytes(8, "little"))
            fh.write(head)
            fh.write(payload)
        os.replace(tmp, path)

    @classmethod
    def load(cls, path, expect_r_det=None, expect_l_max=None, expect_grid=None):
        """Load and verify a saved table; rejects corruption and mismatched
        build parameters."""
        with open(path, "rb") as fh:
            magic = fh.read(len(FORMAT_MAGIC))
            if magic != FORMAT_MAGIC:
                raise TableError(f"not a mode-table file: {path}")
            raw_len = fh.read(8)
            if len(raw_len) != 8:
                raise TableError(f"truncated header in {path}")
            head_len = int.from_bytes(raw_len, "little")
            head_raw = fh.read(head_len)
            if len(head_raw) != head_len:
                raise TableError(f"truncated header in {path}")
            try:
                header = json.loads(head_raw)
            except (ValueError, UnicodeDecodeError) as exc:
                raise TableError(f"unreadable header (corrupt file): {path}: {exc}")
            payload = fh.read()
        if hashlib.sha256(payload).hexdigest() != header["payload_sha256"]:
            raise TableError(f"payload hash mismatch (corrupt file): {path}")
        grid = FrequencyGrid(**header["grid"])
        n = header["n_nodes_actual"]
        l_max = header["l_max"]
        flat = np.frombuffer(payload, dtype="<f8")
        m = (l_max + 1) * n
        values = flat[: 2 * m].reshape(l_max + 1, n, 2)
        defects = flat[2 * m: 3 * m].reshape(l_max + 1, n)
        drifts = flat[3 * m: 4 * m].reshape(l_max + 1, n)
        table = cls(header["r_det"], l_max, grid, values, defects, drifts,
                    header.get("failures", ()))
        if table.params_hash != header["params_hash"]:
            raise TableError(f"parameter hash mismatch in {path}")
        if expect_r_det is not None and expect_r_det != table.r_det:
            raise TableError(
                f"table built at r_det = {table.r_det}, requested {expect_r_det}"
            )
        if expect_l_max is not None and expect_l_max != table.l_max:
            raise TableError(
                f"table built with l_max = {table.l_max}, requested {expect_l_max}"
            )
        if expect_grid is not None and asdict(expect_grid) != asdict(table.grid):
            raise TableError("table grid parameters do not match request")
        return table

    def export_text(self, path):
        """Plain-text export for human inspection (not bit-exact)."""
        with open(path, "w") as fh:
            fh.write(f"# mode table r_det={self.r_det} l_max={self.l_max} "
                     f"hash={self.params_hash}\n")
            fh.write("# l omega R_in_sq R_up_sq unitarity_defect wronskian_drift\n")
            for l in range(self.l_max + 1):
                for i, om in enumerate(self.omegas):
                    fh.write(f"{l} {om:.17g} {self.values[l, i, 0]:.17g} "
                             f"{self.values[l, i, 1]:.17g} {self.defects[l, i]:.3g} "
                             f"{self.drifts[l, i]:.3g}\n")

    def summary(self):
        return {
            "r_det": self.r_det,
            "l_max": self.l_max,
            "omega_min": self.grid.omega_min,
            "omega_max": self.grid.omega_max,
            "n_nodes": len(self.omegas),
            "worst_unitarity_defect": float(np.nanmax(self.defects)),
            "worst_wronskian_drift": float(np.nanmax(self.drifts)),
            "n_failures": len(self.failures),
            "params_hash": self.params_hash,
        }


def build_table(r_det, l_max=DEFAULT_L_MAX, grid=None, workers=None):
    """Build the (l, omega) amplitude grid by repeated solve_modes calls.

    Deterministic: results depend only on the inputs, not on scheduling.
    Fails if more than 0.1% of entries fail; isolated failures are filled by
    linear interpolation of neighboring nodes and recorded in `failures`.
    """
    if grid is None:
        grid = FrequencyGrid()
    omegas = grid.nodes()
    n = len(omegas)
    jobs = [(l, float(om), float(r_det)) for l in range(l_max + 1) for om in omegas]
    if workers is None:
        workers = int(os.environ.get("GEONRESP_WORKERS", "0")) or os.cpu_count() or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_entry, jobs, chunksize=32))
    else:
        results = [_solve_entry(job) for job in jobs]

    values = np.empty((l_max + 1, n, 2))
    defects = np.empty((l_max + 1, n))
    drifts = np.empty((l_max + 1, n))
    failures = []
    for idx, (in2, up2, defect, drift, err) in enumerate(results):
        l, i = divmod(idx, n)
        values[l, i] = (in2, up2)
        defects[l, i] = defect
        drifts[l, i] = drift
        if err:
            failures.append(f"l={l} omega={omegas[i]:.6g}: {err}")
    if len(failures) > max(1, len(jobs) // 1000):
        raise TableError(
            f"{len(failures)} of {len(jobs)} mode solves failed:\n  "
            + "\n  ".join(failures[:10])
        )
    # fill isolated failures from neighbors in omega
    for l in range(l_max + 1):
        for branch in (0, 1):
            col = values[l, :, branch]
            bad = ~np.isfinite(col)
            if bad.any():
                col[bad] = np.interp(omegas[bad], omegas[~bad], col[~bad])
    return ModeTable(r_det, l_max, grid, values, defects, drifts, failures)


def cache_path(cache_dir, r_det, l_max, grid):
    h = _build_params_hash(float(r_det), int(l_max), grid)
    return os.path.join(cache_dir, f"modetable-{h[:16]}.bin")


def get_or_build(r_det, l_max=DEFAULT_L_MAX, grid=None, cache_dir=None,
                 workers=None, force=False):
    """Load a cached table for these parameters or build and cache one.

    Returns (table, was_cache_hit).
    """
    if grid is None:
        grid = FrequencyGrid()
    if cache_dir is None:
        return build_table(r_det, l_max, grid, workers), False
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, r_det, l_max, grid)
    if os.path.exists(path) and not force:
        table = ModeTable.load(path, expect_r_det=float(r_det),
                               expect_l_max=int(l_max), expect_grid=grid)
        return table, True
    table = build_table(r_det, l_max, grid, workers)
    table.save(path)
    return table, False
