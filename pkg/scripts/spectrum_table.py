"""Print the curvature-operator spectrum of the deformed universal hypermultiplet
next to the closed-form eigenvalues, over a small (rho, c) grid."""

import argparse

import numpy as np

from qkcmap.geometries import fs_uhm
from qkcmap.invariants import closed_form_norm, curvature_report, uhm_eigen_formula


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho", type=float, nargs="+", default=[0.5, 1.0, 2.0, 5.0])
    ap.add_argument("--c", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    args = ap.parse_args()

    print(f"{'c':>5} {'rho':>6}  {'computed spectrum (eigenvalue x multiplicity)':<52} {'|R|^2':>10} {'closed':>10}")
    for c in args.c:
        case = fs_uhm(c)
        for rho in args.rho:
            rep = curvature_report(case, case.base_point(rho))
            spec = ", ".join(f"{lam:+.6f}x{mu}" for lam, mu in rep.spectrum)
            lam = uhm_eigen_formula(rho, c)
            print(f"{c:5.2f} {rho:6.2f}  {spec:<52} {rep.norm_R2:10.6f} {closed_form_norm('uhm', 1, rho, c):10.6f}")
            print(f"{'':13}closed form: {np.array2string(lam, precision=6)}")


if __name__ == "__main__":
    main()
