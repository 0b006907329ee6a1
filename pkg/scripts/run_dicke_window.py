#!/usr/bin/env python3
"""Dicke-battery quantum-advantage window: R(g) at N = 50.

This is the heavy run (Krylov stepping, tens of minutes with default
settings).  Pass a smaller --N for a faster look at the same structure.
Writes artifacts/dicke_window.csv plus artifacts/dicke_scaling.csv.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from chargesim.models import ModelKind, Side
from chargesim.runner import SweepConfig, run_sweep


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, default=50)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    out_dir = Path(__file__).resolve().parents[1] / "artifacts"
    out_dir.mkdir(exist_ok=True)

    window = SweepConfig(
        kinds=(ModelKind.DICKE,),
        sides=(Side.QUANTUM, Side.CLASSICAL),
        n_values=(args.N,),
        g_values=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.5, 2.0),
        out=str(out_dir / "dicke_window.csv"),
        workers=args.workers,
    )
    result = run_sweep(window)
    print(f"sweep -> {result.csv_path}")
    best = None
    for r in result.rows:
        if r.side == "quantum":
            print(f"  g={r.g_over_omega0:4}  R={r.ratio:.4f}  cutoff={r.cutoff}")
            if best is None or r.ratio > best[1]:
                best = (r.g_over_omega0, r.ratio)
    print(f"max R = {best[1]:.4f} at g = {best[0]}")

    scaling = SweepConfig(
        kinds=(ModelKind.DICKE,),
        sides=(Side.QUANTUM, Side.CLASSICAL),
        n_values=(8, 12, 16, 24, 32, 40),
        g_values=(2.0,),
        out=str(out_dir / "dicke_scaling.csv"),
        workers=args.workers,
    )
    result2 = run_sweep(scaling)
    print(f"sweep -> {result2.csv_path}")
    return 0 if result.n_failed == 0 and result2.n_failed == 0 else 2


if __name__ == "__main__":
    raise SystemExit(main())
