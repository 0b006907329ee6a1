#!/usr/bin/env python3
"""Quick harmonic benchmark: quantum and classical engines against the
closed-form battery energy, plus the sqrt(N) collective advantage.

Writes artifacts/harmonic_gamma.csv (consumed by the figure package).
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from chargesim.classical import classical_energy_trajectory
from chargesim.models import ModelKind, ModelSpec, Side
from chargesim.oracle import harmonic_energy
from chargesim.quantum import quantum_energy_trajectory
from chargesim.runner import SweepConfig, run_sweep


def main() -> int:
    out_dir = Path(__file__).resolve().parents[1] / "artifacts"
    out_dir.mkdir(exist_ok=True)

    print("pointwise check against N w0 sin^2(g sqrt(N) t):")
    for g in (0.05, 0.5, 2.0):
        for n in (1, 4, 9):
            qu = quantum_energy_trajectory(ModelSpec(ModelKind.HARMONIC, Side.QUANTUM, n, g))
            cl = classical_energy_trajectory(ModelSpec(ModelKind.HARMONIC, Side.CLASSICAL, n, g))
            exact = np.array([harmonic_energy(n, g, 1.0, t) for t in qu.times])
            print(f"  g={g:4} N={n}: quantum err {np.max(np.abs(qu.battery_energy - exact))/n:.2e}"
                  f"  classical err {np.max(np.abs(cl.battery_energy - exact))/n:.2e}")

    config = SweepConfig(
        kinds=(ModelKind.HARMONIC,),
        sides=(Side.QUANTUM, Side.CLASSICAL),
        n_values=(1, 4, 9, 16, 25),
        g_values=(0.2,),
        out=str(out_dir / "harmonic_gamma.csv"),
    )
    result = run_sweep(config)
    print(f"\nsweep -> {result.csv_path}")
    for row in result.rows:
        print(f"  {row.side:9} N={row.n_units:2}  Gamma = {row.gamma:.8f}"
              f"  (sqrt(N) = {row.n_units**0.5:.6f})")
    return 0 if result.n_failed == 0 else 2


if __name__ == "__main__":
    raise SystemExit(main())
