"""Figure recipes: map sweep CSVs onto the six standard panels.

The CSVs come from the geonresp command-line tool.  Response sweeps carry
the columns

    sweep_var,value,vacuum,r,Omega,sigma,tau0,F_BH,F_J,F_total,err_est,status

and rate sweeps carry

    sweep_var,value,vacuum,r,Omega,tau0,rate_BH,rate_J_delta,rate_J_pv,
    rate_J_total,status

Every plotted series is a column or elementwise arithmetic on columns of
rows whose status is "ok"; nothing is recomputed.  Rendering the same CSV
twice produces byte-identical image files (fixed ordering, no embedded
timestamps).
"""

import csv
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class FigureError(Exception):
    """Unusable input: missing columns, empty data, or no matching rows."""


_STRING_COLUMNS = {"sweep_var", "vacuum", "status"}


@dataclass(frozen=True)
class FigureRecipe:
    """Declarative description of one figure."""

    figure: int
    columns: tuple
    xlabel: str
    ylabel: str
    title: str
    builder: str  # name of the module-level _build_fig* function


def read_csv(paths):
    """Read one or more sweep CSVs into a dict of column arrays.

    Lines starting with '#' are comments.  Multiple files are concatenated
    and must share a header.  Numeric columns become float arrays, string
    columns stay as object arrays.
    """
    header = None
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.reader(
                line for line in fh if not line.startswith("#"))
            try:
                file_header = next(reader)
            except StopIteration:
                raise FigureError(f"{path}: empty file (no header)")
            if header is None:
                header = file_header
            elif file_header != header:
                raise FigureError(
                    f"{path}: header {file_header} does not match "
                    f"{header} from the first file")
            for row in reader:
                if len(row) != len(header):
                    raise FigureError(
                        f"{path}: row has {len(row)} cells, "
                        f"header has {len(header)}")
                rows.append(row)
    if not rows:
        raise FigureError(f"no data rows in {', '.join(paths)}")
    columns = {}
    for i, name in enumerate(header):
        cells = [row[i] for row in rows]
        if name in _STRING_COLUMNS:
            columns[name] = np.array(cells, dtype=object)
        else:
            try:
                columns[name] = np.array([float(c) for c in cells])
            except ValueError as exc:
                raise FigureError(f"column '{name}' is not numeric: {exc}")
    return columns


def _require(columns, needed, figure):
    missing = [name for name in needed if name not in columns]
    if missing:
        raise FigureError(
            f"figure {figure} needs column(s) {', '.join(repr(m) for m in missing)}; "
            f"CSV has: {', '.join(sorted(columns))}")


def _ok_rows(columns):
    keep = columns["status"] == "ok"
    if not keep.any():
        raise FigureError("no rows with status 'ok'")
    return {name: col[keep] for name, col in columns.items()}


def _select(columns, **conditions):
    keep = np.ones(len(columns["value"]), dtype=bool)
    for name, want in conditions.items():
        keep &= columns[name] == want
    return {name: col[keep] for name, col in columns.items()}


def _sorted_by_value(columns):
    order = np.argsort(columns["value"], kind="stable")
    return {name: col[order] for name, col in columns.items()}


def _new_axes(recipe):
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    ax.set_xlabel(recipe.xlabel)
    ax.set_ylabel(recipe.ylabel)
    ax.set_title(recipe.title)
    return fig, ax


def _response_triplet(ax, data):
    ax.plot(data["value"], data["F_BH"], color="tab:blue",
            label="black hole")
    ax.plot(data["value"], data["F_J"], color="tab:red", label="image part")
    ax.plot(data["value"], data["F_total"], color="tab:green",
            label="total")


def _check_total_is_sum(data, figure):
    lhs = data["F_total"]
    rhs = data["F_BH"] + data["F_J"]
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    bad = np.abs(lhs - rhs) > 1e-9 * np.maximum(scale, 1e-300)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise FigureError(
            f"figure {figure}: F_total != F_BH + F_J at value "
            f"{data['value'][i]:g} ({lhs[i]:.12e} vs {rhs[i]:.12e})")


def _build_fig2(recipe, columns, ax):
    data = _sorted_by_value(_ok_rows(columns))
    _check_total_is_sum(data, recipe.figure)
    _response_triplet(ax, data)


def _build_fig3(recipe, columns, ax):
    data = _select(_ok_rows(columns), vacuum="hartle-hawking")
    if len(data["value"]) == 0:
        raise FigureError("figure 3: no 'hartle-hawking' rows in the CSV")
    _response_triplet(ax, _sorted_by_value(data))


def _build_fig4(recipe, columns, ax):
    data = _select(_ok_rows(columns), vacuum="unruh")
    if len(data["value"]) == 0:
        raise FigureError("figure 4: no 'unruh' rows in the CSV")
    _response_triplet(ax, _sorted_by_value(data))


def _build_fig5(recipe, columns, ax):
    data = _sorted_by_value(_ok_rows(columns))
    ax.plot(data["value"], data["F_J"] / data["F_BH"], color="tab:red",
            marker="o", label="relative image signal")


def _build_fig6(recipe, columns, ax):
    data = _ok_rows(columns)
    for vacuum in sorted(set(data["vacuum"])):
        sub = _sorted_by_value(_select(data, vacuum=vacuum))
        ax.plot(sub["value"], sub["rate_BH"], label=str(vacuum))
    ax.set_yscale("log")  # rates span decades across the gap range


def _build_fig7(recipe, columns, ax):
    data = _ok_rows(columns)
    for gap in sorted(set(data["Omega"])):
        sub = _sorted_by_value(_select(data, Omega=gap))
        ax.plot(sub["value"], sub["rate_J_total"],
                label=f"$\\Omega$ = {gap:g}")


_RESPONSE_COLS = ("value", "vacuum", "F_BH", "F_J", "F_total", "status")

RECIPES = {
    2: FigureRecipe(2, _RESPONSE_COLS, "detector gap $\\Omega$",
                    "response", "response vs gap", "_build_fig2"),
    3: FigureRecipe(3, _RESPONSE_COLS, "detector radius $r$",
                    "response", "response vs radius (Hartle-Hawking)",
                    "_build_fig3"),
    4: FigureRecipe(4, _RESPONSE_COLS, "detector radius $r$",
                    "response", "response vs radius (Unruh)", "_build_fig4"),
    5: FigureRecipe(5, ("value", "F_BH", "F_J", "status"),
                    "switching width $\\sigma$", "$F_J / F_{BH}$",
                    "relative image signal vs switching width",
                    "_build_fig5"),
    6: FigureRecipe(6, ("value", "vacuum", "rate_BH", "status"),
                    "detector gap $\\Omega$", "transition rate",
                    "rates vs gap by vacuum", "_build_fig6"),
    7: FigureRecipe(7, ("value", "Omega", "rate_J_total", "status"),
                    "switch-off time $\\tau_0$", "image rate",
                    "image rate vs time by gap", "_build_fig7"),
}


def _deterministic_metadata(path):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".png":
        # drop the autogenerated Software tag (carries library version text)
        return {"Software": None}
    if ext == ".pdf":
        return {"CreationDate": None}
    if ext == ".svg":
        return {"Date": None}
    return None


def render(figure, csv_paths, out_path):
    """Render one figure from its CSV inputs to an image file."""
    if figure not in RECIPES:
        raise FigureError(
            f"unknown figure {figure}; available: {sorted(RECIPES)}")
    recipe = RECIPES[figure]
    columns = read_csv(csv_paths)
    _require(columns, recipe.columns, figure)
    fig, ax = _new_axes(recipe)
    try:
        globals()[recipe.builder](recipe, columns, ax)
        ax.legend(loc="best")
        fig.savefig(out_path, metadata=_deterministic_metadata(out_path))
    finally:
        plt.close(fig)
    return out_path
