"""Willmore and J drift of the level-2 flow against the time step.

Runs the ridge data to time T at several dt and prints each drift with the
ratio to the next smaller step; RK4 should give ratios near 16.

Usage: python3 scripts/drift_convergence.py [--grid 64] [--T 0.1] [--dts 2e-3,1e-3,5e-4]
"""

import argparse

from dslab.flow import DeformationState, conservation_report, run
from dslab.grid import GridSpec
from dslab.spinor import catalog_solution


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--T", type=float, default=0.1)
    ap.add_argument("--dts", default="2e-3,1e-3,5e-4")
    ap.add_argument("--mode", type=int, default=2)
    ap.add_argument("--amplitude", type=float, default=2.0)
    args = ap.parse_args()

    spec = GridSpec(args.grid, args.grid)
    p, psi, phi = catalog_solution("ridge", spec, mode=args.mode, amplitude=args.amplitude)
    state = DeformationState(0.0, p.p, psi, phi)
    drifts = []
    for dt in (float(v) for v in args.dts.split(",")):
        res = run(state, dt, int(round(args.T / dt)), 2)
        d = conservation_report(res.records)["drift"]
        drifts.append((dt, d))
        print(f"dt={dt:.1e}  W {d['W']:.3e}  " + "  ".join(
            f"{k[2:]} {v:.3e}" for k, v in d.items() if k.startswith("J_")))
    print("\nreduction per halving:")
    for (dt, a), (_, b) in zip(drifts, drifts[1:]):
        ratios = {k: a[k] / b[k] for k in a if (k == "W" or k.startswith("J_")) and b[k] > 0}
        print(f"dt={dt:.1e}: " + "  ".join(f"{k} {v:.2f}" for k, v in ratios.items()))


if __name__ == "__main__":
    main()
