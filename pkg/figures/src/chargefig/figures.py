"""Deterministic figure rendering from sweep CSVs.

Three figure types are supported:

* ``gamma_vs_N`` -- collective advantage against battery size, log-log by
  default, with an optional dashed reference line of slope 0.5 or 1 drawn
  through the first data point.
* ``R_vs_N``     -- quantum/classical ratio against battery size.
* ``R_vs_g``     -- quantum/classical ratio against coupling at fixed size.

Rendering is a pure view over the CSV: byte-identical input produces
pixel-identical PNG and SVG output (fixed size, fonts, and hash salt, no
timestamps).  No physics is ever recomputed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError, load_rows

__all__ = ["FigureSpec", "FilterError", "reference_line", "render", "FIGURE_IDS"]

FIGURE_IDS = ("gamma_vs_N", "R_vs_N", "R_vs_g")

_AXES = {
    "gamma_vs_N": ("N", "gamma"),
    "R_vs_N": ("N", "ratio"),
    "R_vs_g": ("g_over_omega0", "ratio"),
}

_LABELS = {
    "N": "N",
    "gamma": r"$\Gamma$",
    "ratio": r"$R$",
    "g_over_omega0": r"$g/\omega_0$",
}


class FilterError(ValueError):
    """The filtered selection is empty or otherwise unusable."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSV, figure id, filters, and styling."""

    csv_path: str
    figure_id: str
    out_path: str
    model: str | None = None
    side: str | None = None
    g: float | None = None
    n_units: int | None = None
    loglog: bool | None = None
    ref_slope: float | None = None

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}; "
                             f"expected one of {FIGURE_IDS}")
        if self.ref_slope is not None and self.ref_slope not in (0.5, 1.0):
            raise ValueError("ref_slope must be 0.5, 1, or omitted")

    @property
    def use_loglog(self) -> bool:
        if self.loglog is not None:
            return self.loglog
        return self.figure_id == "gamma_vs_N"


def _select(rows: list[dict], spec: FigureSpec) -> list[dict]:
    x_col, y_col = _AXES[spec.figure_id]
    out = []
    for row in rows:
        if spec.model is not None and row["model"] != spec.model:
            continue
        if spec.side is not None and row["side"] != spec.side:
            continue
        if spec.g is not None and abs(float(row["g_over_omega0"]) - spec.g) > 1e-12:
            continue
        if spec.n_units is not None and int(row["N"]) != spec.n_units:
            continue
        if not row[x_col] or not row[y_col]:
            continue
        out.append(row)
    if not out:
        raise FilterError(
            f"no rows left for {spec.figure_id} after filtering "
            f"(model={spec.model}, side={spec.side}, g={spec.g}, N={spec.n_units})"
        )
    return out


def reference_line(xs: np.ndarray, slope: float, x0: float, y0: float) -> np.ndarray:
    """Power-law guide of the requested slope through the anchor point."""
    return y0 * (xs / x0) ** slope


def render(spec: FigureSpec) -> list[Path]:
    """Render one figure; writes both PNG and SVG, returns their paths."""
    rows = _select(load_rows(spec.csv_path), spec)
    x_col, y_col = _AXES[spec.figure_id]
    xs = np.array([float(r[x_col]) for r in rows])
    ys = np.array([float(r[y_col]) for r in rows])
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]

    plt.rcParams["svg.hashsalt"] = "chargefig"
    fig, ax = plt.subplots(figsize=(4.4, 3.3), dpi=150)
    ax.plot(xs, ys, "o-", color="#1f77b4", markersize=4, linewidth=1.0)

    if spec.ref_slope is not None:
        guide = reference_line(xs, spec.ref_slope, xs[0], ys[0])
        ax.plot(xs, guide, "k--", linewidth=1.0,
                label=rf"slope {spec.ref_slope:g}")
        ax.legend(frameon=False, fontsize=8)
    if y_col == "ratio":
        ax.axhline(1.0, color="0.6", linewidth=0.7, zorder=0)

    if spec.use_loglog:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(_LABELS[x_col])
    ax.set_ylabel(_LABELS[y_col])
    title_bits = [spec.model or "", spec.side or ""]
    ax.set_title(" ".join(b for b in title_bits if b), fontsize=9)
    fig.tight_layout()

    stem = Path(spec.out_path)
    if stem.suffix in (".png", ".svg"):
        stem = stem.with_suffix("")
    stem.parent.mkdir(parents=True, exist_ok=True)
    paths = []
    for ext, meta in ((".png", None), (".svg", {"Date": None})):
        target = stem.with_suffix(ext)
        fig.savefig(target, metadata=meta)
        paths.append(target)
    plt.close(fig)
    return paths
