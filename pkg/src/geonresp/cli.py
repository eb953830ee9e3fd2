"""Command-line front end: mode diagnostics, table management, response and
rate sweeps with CSV output.

Exit codes: 0 success, 1 compute/I-O failure, 2 usage error.
Defaults reproduce the baseline configuration Omega=0, r=3, sigma=100,
tau0=0 in the Hartle-Hawking vacuum.
"""

import argparse
import math
import os
import sys
from datetime import datetime, timezone

from geonresp.errors import DomainError, GeonRespError, TableError
from geonresp.mode_table import (
    DEFAULT_L_MAX,
    FrequencyGrid,
    ModeTable,
    build_table,
    cache_path,
    get_or_build,
)
from geonresp.radial_modes import solve_modes
from geonresp.response import Vacuum, evaluate_point
from geonresp.rates import rate_BH, rate_J
from geonresp.spacetime import local_temperature

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_USAGE = 2

DEFAULTS = {
    "Omega": 0.0,
    "r": 3.0,
    "sigma": 100.0,
    "tau0": 0.0,
    "vacuum": "hartle-hawking",
    "l_max": DEFAULT_L_MAX,
    "omega_min": 1e-4,
    "omega_max": 8.0,
    "n_nodes": 400,
}

RESPONSE_HEADER = "sweep_var,value,vacuum,r,Omega,sigma,tau0,F_BH,F_J,F_total,err_est,status"
RATE_HEADER = "sweep_var,value,vacuum,r,Omega,tau0,rate_BH,rate_J_delta,rate_J_pv,rate_J_total,status"

VACUA = {
    "hartle-hawking": Vacuum.HARTLE_HAWKING,
    "unruh": Vacuum.UNRUH,
    "boulware": Vacuum.BOULWARE,
}


def read_config(path):
    """Flat key=value config file; '#' starts a comment."""
    config = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            config[key] = value
    return config


def resolve(args, config, key, cast=float):
    """Precedence: CLI flag > config file > built-in default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return cast(config[key])
    return DEFAULTS[key]


def default_cache_dir():
    env = os.environ.get("GEONRESP_CACHE_DIR")
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "geonresp")


def parse_values(spec):
    """Comma-separated float list."""
    try:
        return [float(s) for s in spec.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"bad numeric list {spec!r}: {exc}")


def sweep_values(args):
    if args.values is not None:
        return parse_values(args.values)
    if args.start is not None or args.stop is not None or args.num is not None:
        if None in (args.start, args.stop, args.num):
            raise DomainError("--start, --stop and --num must be given together")
        if args.num < 1:
            raise DomainError("--num must be >= 1")
        if args.log:
            if args.start <= 0 or args.stop <= 0:
                raise DomainError("log spacing needs positive endpoints")
            ratio = (args.stop / args.start) ** (1.0 / max(args.num - 1, 1))
            return [args.start * ratio ** i for i in range(args.num)]
        step = (args.stop - args.start) / max(args.num - 1, 1)
        return [args.start + step * i for i in range(args.num)]
    return None


def open_output(args):
    if args.output in (None, "-"):
        return sys.stdout, False
    return open(args.output, "w"), True


def write_header(fh, args, header, argv):
    if not args.no_timestamp:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        fh.write(f"# generated {stamp} by geonresp {' '.join(argv)}\n")
    fh.write(header + "\n")


def fmt(x):
    if isinstance(x, float):
        return f"{x:.12e}" if math.isfinite(x) else "nan"
    return str(x)


def get_table(args, config, r, l_max, grid):
    cache_dir = args.cache_dir or config.get("cache_dir") or default_cache_dir()
    if args.no_cache:
        return build_table(r, l_max, grid), False
    return get_or_build(r, l_max, grid, cache_dir=cache_dir,
                        force=getattr(args, "force", False))


# ---------------------------------------------------------------------------
#  Subcommands
# ---------------------------------------------------------------------------

def cmd_modes(args, config, argv):
    if not args.r > 1.0:
        print(f"error: r must be > 1 (horizon radius), got {args.r}", file=sys.stderr)
        return EXIT_USAGE
    if not args.omega > 0.0:
        print(f"error: omega must be > 0, got {args.omega}", file=sys.stderr)
        return EXIT_USAGE
    if args.l < 0:
        print(f"error: l must be >= 0, got {args.l}", file=sys.stderr)
        return EXIT_USAGE
    sol = solve_modes(args.l, args.omega, args.r)
    print(f"l = {sol.l}, omega = {sol.omega}, r = {sol.r_det}")
    print(f"A_in  = {sol.A_in:.12g}")
    print(f"B_in  = {sol.B_in:.12g}")
    print(f"A_up  = {sol.A_up:.12g}")
    print(f"B_up  = {sol.B_up:.12g}")
    print(f"|A_in|^2 = {abs(sol.A_in)**2:.12e}  |B_in|^2 = {abs(sol.B_in)**2:.12e}")
    print(f"|A_up|^2 = {abs(sol.A_up)**2:.12e}  |B_up|^2 = {abs(sol.B_up)**2:.12e}")
    print(f"unitarity defect (in) = {sol.unitarity_defect_in:.3e}")
    print(f"unitarity defect (up) = {sol.unitarity_defect_up:.3e}")
    print(f"|R_in(r)|^2 = {abs(sol.R_in_det)**2:.12e}")
    print(f"|R_up(r)|^2 = {abs(sol.R_up_det)**2:.12e}")
    print(f"wronskian drift = {sol.wronskian_drift:.3e}")
    return EXIT_OK


def cmd_table(args, config, argv):
    r = resolve(args, config, "r")
    l_max = int(resolve(args, config, "l_max", int))
    grid = FrequencyGrid(
        omega_min=resolve(args, config, "omega_min"),
        omega_max=resolve(args, config, "omega_max"),
        n_nodes=int(resolve(args, config, "n_nodes", int)),
    )
    cache_dir = args.cache_dir or config.get("cache_dir") or default_cache_dir()
    path = cache_path(cache_dir, r, l_max, grid)
    if args.action == "inspect":
        table = ModeTable.load(path)
        for key, value in table.summary().items():
            print(f"{key} = {value}")
        return EXIT_OK
    # build
    hit = False
    if os.path.exists(path):
        try:
            ModeTable.load(path, expect_r_det=r, expect_l_max=l_max,
                           expect_grid=grid)
            hit = not args.force
        except TableError as exc:
            if not args.force:
                print(f"error: cached table is unusable ({exc}); "
                      f"pass --force to rebuild", file=sys.stderr)
                return EXIT_COMPUTE
            print(f"warning: rebuilding corrupted cache ({exc})", file=sys.stderr)
    if hit:
        print(f"cache hit: {path} (no recompute)")
        return EXIT_OK
    os.makedirs(cache_dir, exist_ok=True)
    table = build_table(r, l_max, grid)
    table.save(path)
    print(f"built table: {path}")
    for key, value in table.summary().items():
        print(f"{key} = {value}")
    return EXIT_OK


def cmd_response(args, config, argv):
    Omega = resolve(args, config, "Omega")
    r = resolve(args, config, "r")
    sigma = resolve(args, config, "sigma")
    tau0 = resolve(args, config, "tau0")
    l_max = int(resolve(args, config, "l_max", int))
    grid = FrequencyGrid(
        omega_min=resolve(args, config, "omega_min"),
        omega_max=resolve(args, config, "omega_max"),
        n_nodes=int(resolve(args, config, "n_nodes", int)),
    )
    vacua = _parse_vacua(resolve(args, config, "vacuum", str))
    values = sweep_values(args)
    kind = args.sweep or "gap"
    if values is None:
        values = [{"gap": Omega, "radius": r, "sigma": sigma,
                   "tau0": tau0}[kind]]

    tables = {}

    def table_for(radius):
        if radius not in tables:
            tables[radius], _ = get_table(args, config, radius, l_max, grid)
        return tables[radius]

    fh, close = open_output(args)
    try:
        write_header(fh, args, RESPONSE_HEADER, argv)
        failed = 0
        for vac in vacua:
            for value in values:
                p = {"Omega": Omega, "r": r, "sigma": sigma, "tau0": tau0}
                p[{"gap": "Omega", "radius": "r", "sigma": "sigma",
                   "tau0": "tau0"}[kind]] = value
                try:
                    res = evaluate_point(p["Omega"], p["r"], p["sigma"],
                                         p["tau0"], vac, table_for(p["r"]))
                    row = [kind, value, vac.value, p["r"], p["Omega"],
                           p["sigma"], p["tau0"], res.F_BH, res.F_J,
                           res.F_total, res.err_BH + res.err_J, res.status]
                except GeonRespError as exc:
                    failed += 1
                    msg = f"error: {type(exc).__name__}: {exc}".replace(",", ";")
                    row = [kind, value, vac.value, p["r"], p["Omega"],
                           p["sigma"], p["tau0"], math.nan, math.nan,
                           math.nan, math.nan, msg]
                fh.write(",".join(fmt(x) for x in row).replace("\n", " ") + "\n")
        return EXIT_COMPUTE if failed == len(values) * len(vacua) else EXIT_OK
    finally:
        if close:
            fh.close()


def cmd_rate(args, config, argv):
    r = resolve(args, config, "r")
    tau0 = resolve(args, config, "tau0")
    l_max = int(resolve(args, config, "l_max", int))
    grid = FrequencyGrid(
        omega_min=resolve(args, config, "omega_min"),
        omega_max=resolve(args, config, "omega_max"),
        n_nodes=int(resolve(args, config, "n_nodes", int)),
    )
    vacua = _parse_vacua(resolve(args, config, "vacuum", str))
    if args.Omega is not None:
        gaps = parse_values(args.Omega)
    elif "Omega" in config:
        gaps = parse_values(config["Omega"])
    else:
        gaps = [DEFAULTS["Omega"]]
    values = sweep_values(args)
    kind = args.sweep or "gap"
    if kind == "gap" and values is not None:
        gaps = values
        values = [None]
    elif values is None:
        values = [{"tau0": tau0, "radius": r}.get(kind, 0.0)]

    tables = {}

    def table_for(radius):
        if radius not in tables:
            tables[radius], _ = get_table(args, config, radius, l_max, grid)
        return tables[radius]

    fh, close = open_output(args)
    try:
        write_header(fh, args, RATE_HEADER, argv)
        failed = total = 0
        for vac in vacua:
            for gap in gaps:
                for value in values:
                    p = {"Omega": gap, "r": r, "tau0": tau0}
                    if kind == "gap":
                        sweep_value = gap
                    else:
                        p[{"radius": "r", "tau0": "tau0"}[kind]] = value
                        sweep_value = value
                    if args.gap_units == "t-loc":
                        p["Omega"] = p["Omega"] * local_temperature(p["r"])
                    total += 1
                    try:
                        table = table_for(p["r"])
                        bh = rate_BH(p["Omega"], p["r"], vac, table)
                        if vac is Vacuum.BOULWARE:
                            delta = pv = geon = math.nan
                        else:
                            res = rate_J(p["Omega"], p["r"], p["tau0"], vac,
                                         table, full=True)
                            delta, pv, geon = res.delta_term, res.pv_term, res.rate
                        row = [kind, sweep_value, vac.value, p["r"], p["Omega"],
                               p["tau0"], bh, delta, pv, geon, "ok"]
                    except GeonRespError as exc:
                        failed += 1
                        msg = f"error: {type(exc).__name__}: {exc}".replace(",", ";")
                        row = [kind, sweep_value, vac.value, p["r"], p["Omega"],
                               p["tau0"], math.nan, math.nan, math.nan,
                               math.nan, msg]
                    fh.write(",".join(fmt(x) for x in row).replace("\n", " ") + "\n")
        return EXIT_COMPUTE if failed == total else EXIT_OK
    finally:
        if close:
            fh.close()


def _parse_vacua(spec):
    if spec == "all":
        return [Vacuum.HARTLE_HAWKING, Vacuum.UNRUH, Vacuum.BOULWARE]
    vacua = []
    for name in spec.split(","):
        name = name.strip().lower()
        if name not in VACUA:
            raise DomainError(
                f"unknown vacuum {name!r}; choose from {sorted(VACUA)} or 'all'"
            )
        vacua.append(VACUA[name])
    return vacua


# ---------------------------------------------------------------------------
#  Argument parsing
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--cache-dir", help="mode-table cache directory "
                   "(default: $GEONRESP_CACHE_DIR or ~/.cache/geonresp)")
    p.add_argument("--no-cache", action="store_true",
                   help="build tables in memory, skip the cache")
    p.add_argument("--l-max", dest="l_max", type=int)
    p.add_argument("--omega-min", dest="omega_min", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--n-nodes", dest="n_nodes", type=int)


def _add_sweep(p):
    p.add_argument("--sweep", choices=("gap", "radius", "sigma", "tau0"))
    p.add_argument("--values", help="comma-separated sweep values")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int)
    p.add_argument("--log", action="store_true", help="log-spaced sweep")
    p.add_argument("--output", "-o", help="CSV path ('-' for stdout)")
    p.add_argument("--no-timestamp", action="store_true",
                   help="suppress the timestamped header comment")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="geonresp",
        description="Static-detector response outside a Schwarzschild black "
                    "hole and its geon correction (units 2M = 1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", help="solve one (l, omega) mode pair")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("table", help="build or inspect the cached mode table")
    p.add_argument("action", choices=("build", "inspect"))
    p.add_argument("--r", type=float)
    p.add_argument("--force", action="store_true",
                   help="rebuild even if a (possibly corrupt) cache exists")
    _add_common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("response", help="Gaussian-switching response (CSV)")
    p.add_argument("--Omega", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--tau0", type=float)
    p.add_argument("--vacuum", help="hartle-hawking, unruh, comma list, or 'all'")
    _add_common(p)
    _add_sweep(p)
    p.set_defaults(func=cmd_response)

    p = sub.add_parser("rate", help="sudden-switching transition rates (CSV)")
    p.add_argument("--Omega", help="gap value or comma list")
    p.add_argument("--gap-units", choices=("absolute", "t-loc"),
                   default="absolute",
                   help="interpret --Omega in units of the local temperature")
    p.add_argument("--r", type=float)
    p.add_argument("--tau0", type=float)
    p.add_argument("--vacuum", help="vacuum name, comma list, or 'all'")
    _add_common(p)
    _add_sweep(p)
    p.set_defaults(func=cmd_rate)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    config = {}
    if getattr(args, "config", None):
        try:
            config = read_config(args.config)
        except (OSError, DomainError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args, config, argv)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeonRespError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
