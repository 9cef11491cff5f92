"""Figure recipes over the sweep CSV schema.

Each recipe reads one CSV produced by the xlmimo-ee runner and renders a
deterministic PNG: fixed style, fixed size, no timestamps, series iterated in
sorted order.  The input file is never modified.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FIGURE_IDS = ("se_tightness", "ee_vs_bw", "ee_vs_n", "setup_compare")

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}

_REQUIRED = {
    "se_tightness": ("axis_value", "K", "se_ub", "se_app", "se_mc_mean", "se_mc_ci95"),
    "ee_vs_bw": ("axis_value", "K", "ee_bits_per_joule"),
    "ee_vs_n": ("axis_value", "ee_bits_per_joule", "notes"),
    "setup_compare": ("axis_value", "ee_bits_per_joule", "notes"),
}


class FigureError(ValueError):
    """Recipe-level failure (bad figure id, unusable CSV)."""


class MissingColumnError(FigureError):
    def __init__(self, column: str):
        super().__init__(f"CSV is missing required column {column!r}")
        self.column = column


class EmptyCsvError(FigureError):
    def __init__(self):
        super().__init__("CSV contains no data rows")


@dataclass(frozen=True)
class FigureRecipe:
    """One plot job: source CSV, figure kind, output image path."""

    input_csv: str
    figure_id: str
    output_image: str

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise FigureError(f"unknown figure id {self.figure_id!r}; expected one of {FIGURE_IDS}")


def _read_rows(path: str, figure_id: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in _REQUIRED[figure_id]:
            if column not in header:
                raise MissingColumnError(column)
        rows = list(reader)
    if not rows:
        raise EmptyCsvError()
    return rows


def _floats(rows, column):
    """Column values as floats; None for empty cells."""
    out = []
    for row in rows:
        raw = (row[column] or "").strip()
        out.append(float(raw) if raw else None)
    return out


def _series_by(rows, key):
    groups: dict = {}
    for row in rows:
        groups.setdefault(row[key], []).append(row)
    return dict(sorted(groups.items()))


def _plot_se_tightness(rows, ax):
    for k, group in _series_by(rows, "K").items():
        x = _floats(group, "axis_value")
        ub = _floats(group, "se_ub")
        app = _floats(group, "se_app")
        mc = _floats(group, "se_mc_mean")
        ci = _floats(group, "se_mc_ci95")
        label = f"K={k}"
        pairs = [(xi, v) for xi, v in zip(x, ub) if v is not None]
        if pairs:
            ax.plot(*zip(*pairs), "-", label=f"{label} upper bound")
        pairs = [(xi, v) for xi, v in zip(x, app) if v is not None]
        if pairs:
            ax.plot(*zip(*pairs), "--", label=f"{label} approximation")
        trip = [(xi, v, c or 0.0) for xi, v, c in zip(x, mc, ci) if v is not None]
        if trip:
            xs, ys, cs = zip(*trip)
            ax.errorbar(xs, ys, yerr=cs, fmt="o", markersize=3.5, capsize=2,
                        linestyle="none", label=f"{label} Monte Carlo")
    ax.set_xscale("log")
    ax.set_xlabel("transmit power density (W/Hz)")
    ax.set_ylabel("spectral efficiency (bits/s/Hz)")
    ax.set_title("Ergodic SE: bound and approximation vs Monte Carlo")


def _plot_ee_vs_bw(rows, ax):
    for k, group in _series_by(rows, "K").items():
        pairs = [
            (x, v)
            for x, v in zip(_floats(group, "axis_value"), _floats(group, "ee_bits_per_joule"))
            if v is not None
        ]
        if pairs:
            ax.plot(*zip(*pairs), "-o", markersize=3, label=f"K={k}")
    ax.set_xscale("log")
    ax.set_xlabel("bandwidth (Hz)")
    ax.set_ylabel("energy efficiency (bits/J)")
    ax.set_title("EE vs bandwidth")


def _knee_from_notes(rows):
    for row in rows:
        for token in (row.get("notes") or "").split(";"):
            if token.startswith("knee_n="):
                return float(token.split("=", 1)[1])
    return None


def _plot_ee_vs_n(rows, ax):
    pairs = [
        (x, v)
        for x, v in zip(_floats(rows, "axis_value"), _floats(rows, "ee_bits_per_joule"))
        if v is not None
    ]
    if pairs:
        ax.plot(*zip(*pairs), "-o", markersize=3, label="EE")
    knee = _knee_from_notes(rows)
    if knee is not None:
        ax.axvline(knee, color="tab:red", linestyle=":", label=f"knee point ({knee:.0f})")
    ax.set_xscale("log")
    ax.set_xlabel("antenna count")
    ax.set_ylabel("energy efficiency (bits/J)")
    ax.set_title("EE vs array size")


def _plot_setup_compare(rows, ax):
    for setup, group in _series_by(rows, "notes").items():
        pairs = [
            (x, v)
            for x, v in zip(_floats(group, "axis_value"), _floats(group, "ee_bits_per_joule"))
            if v is not None
        ]
        if pairs:
            ax.plot(*zip(*pairs), "-o", markersize=3, label=setup or "unnamed")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("transmit power density (W/Hz)")
    ax.set_ylabel("energy efficiency (bits/J)")
    ax.set_title("EE comparison across system setups")


_PLOTTERS = {
    "se_tightness": _plot_se_tightness,
    "ee_vs_bw": _plot_ee_vs_bw,
    "ee_vs_n": _plot_ee_vs_n,
    "setup_compare": _plot_setup_compare,
}


def render(recipe: FigureRecipe) -> str:
    """Render the recipe to its output path and return the path.

    Raises MissingColumnError / EmptyCsvError before any file is written.
    """
    rows = _read_rows(recipe.input_csv, recipe.figure_id)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            _PLOTTERS[recipe.figure_id](rows, ax)
            if ax.get_legend_handles_labels()[0]:
                ax.legend(loc="best", fontsize=8)
            fig.tight_layout()
            fig.savefig(recipe.output_image, format="png", metadata={"Software": ""})
        finally:
            plt.close(fig)
    return recipe.output_image
