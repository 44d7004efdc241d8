"""Which spinor ratios reproduce the Gauss map coordinates on catalog surfaces.

Usage: python3 scripts/gauss_ratio_family.py [--grid 64]
"""

import argparse

import numpy as np

from dslab.gaussmap import surface_gauss_report
from dslab.grid import GridSpec
from dslab.spinor import catalog_solution
from dslab.weierstrass import integrate_surface, one_form_coefficients


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=64)
    args = ap.parse_args()
    spec = GridSpec(args.grid, args.grid)
    k = complex(np.pi / spec.lx, np.pi / spec.ly)
    cases = {
        "plane": {},
        "wave": {"c": abs(k), "k": k},
        "gauged_wave": {"c": abs(k), "k": k, "f": 0.2 - 0.3j},
        "ridge": {},
    }
    for kind, params in cases.items():
        p, psi, phi = catalog_solution(kind, spec, **params)
        rep = surface_gauss_report(integrate_surface(one_form_coefficients(psi, phi)), psi, phi)
        errs = rep["ratio_family"]["errors"]
        print(f"{kind:12s} quadric {rep['quadric_residual_max']:.2e}  sigma {rep['sigma_consistency']:.2e}  "
              + "  ".join(f"{name} {v:.2e}" for name, v in errs.items())
              + f"  -> {rep['ratio_family']['matching']}")


if __name__ == "__main__":
    main()
