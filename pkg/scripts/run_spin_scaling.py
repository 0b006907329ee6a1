#!/usr/bin/env python3
"""Spin-battery scaling: Gamma(N) for the quantum and classical models and
their ratio R, over two couplings to exhibit the g-independence.

Writes artifacts/spin_scaling.csv and prints the power-law fits.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from chargesim.metrics import fit_power_law
from chargesim.models import ModelKind, Side
from chargesim.runner import SweepConfig, run_sweep


def main() -> int:
    out_dir = Path(__file__).resolve().parents[1] / "artifacts"
    out_dir.mkdir(exist_ok=True)
    config = SweepConfig(
        kinds=(ModelKind.SPIN,),
        sides=(Side.QUANTUM, Side.CLASSICAL),
        n_values=(8, 12, 16, 24, 32),
        g_values=(0.1, 1.0),
        out=str(out_dir / "spin_scaling.csv"),
    )
    result = run_sweep(config)
    print(f"sweep -> {result.csv_path}")
    for side in ("quantum", "classical"):
        points = [(r.n_units, r.gamma) for r in result.rows
                  if r.side == side and r.g_over_omega0 == 1.0]
        fit = fit_power_law(points)
        print(f"  {side:9} Gamma ~ {fit.prefactor:.4f} * N^{fit.alpha:.4f}")
    for r in result.rows:
        if r.side == "quantum" and r.g_over_omega0 == 1.0:
            print(f"  N={r.n_units:3}  Gamma_qu={r.gamma:.4f}  R={r.ratio:.4f}")
    return 0 if result.n_failed == 0 else 2


if __name__ == "__main__":
    raise SystemExit(main())
