"""Sweep CSV schema consumed by the figure renderers.

This mirrors the column contract of the simulation package's sweep output;
the two packages share only this file format, never code.
"""

from __future__ import annotations

import csv
from pathlib import Path

SWEEP_COLUMNS = (
    "model", "side", "N", "g_over_omega0", "epsilon", "cutoff",
    "tau_bar", "E_bar_norm", "P_bar_norm", "gamma", "ratio",
    "norm_drift", "energy_drift", "wall_time_s", "status",
)


class SchemaError(ValueError):
    """The input CSV does not match the sweep schema."""


def load_rows(csv_path: str | Path) -> list[dict]:
    """Read a sweep CSV, keeping only rows with status ok.

    Raises :class:`SchemaError` when the file is missing or its header does
    not match the sweep contract exactly.
    """
    path = Path(csv_path)
    if not path.exists():
        raise SchemaError(f"CSV not found: {path}")
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != list(SWEEP_COLUMNS):
            raise SchemaError(
                f"{path} header does not match the sweep schema "
                f"(got {reader.fieldnames})"
            )
        return [row for row in reader if row["status"] == "ok"]
