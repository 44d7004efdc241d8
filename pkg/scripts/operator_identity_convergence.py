"""Residual of the Lax identity for levels 1-3 as the grid is refined.

Usage: python3 scripts/operator_identity_convergence.py [--seeds 3] [--sizes 16,32,64,128]
"""

import argparse

from dslab.grid import GridSpec
from dslab.hierarchy import operator_identity_residual, random_state, resolve_a3_variant


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--sizes", default="16,32,64,128")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'N':>5} " + " ".join(f"{'n=' + str(n):>12}" for n in (1, 2, 3)))
    for N in sizes:
        spec = GridSpec(N, N)
        row = []
        for n in (1, 2, 3):
            worst = max(operator_identity_residual(n, *random_state(spec, s)).max_abs() for s in range(args.seeds))
            row.append(worst)
        print(f"{N:>5} " + " ".join(f"{v:12.3e}" for v in row))

    finding = resolve_a3_variant(GridSpec(32, 32))
    print("\nA3 readings at 32x32:")
    for name, value in sorted(finding["residuals"].items()):
        print(f"  {name:8s} {value:.3e}")
    print(f"resolved: {finding['resolved']}")


if __name__ == "__main__":
    main()
