"""Dump |reduced Lopatinski function| over (xi, theta) at several eta for one shock.

Usage: python scripts/reduced_map.py M Mminus R "F11 ... F33" [--out reduced_map.csv]
"""

import argparse

import numpy as np

from elastoshock import DimensionlessShock, classify
from elastoshock.spectral import ScanGrid, write_scan_csv


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("M", type=float)
    ap.add_argument("Mminus", type=float)
    ap.add_argument("R", type=float)
    ap.add_argument("F")
    ap.add_argument("--out", default="reduced_map.csv")
    args = ap.parse_args()
    F = np.array([float(x) for x in args.F.split()]).reshape(3, 3)
    shock = DimensionlessShock(args.M, args.Mminus, args.R, F)
    shock.require_admissible()
    rep = classify(shock)
    print(f"closed form: {rep.verdict.value}, margin {rep.min_margin:.4e} at theta {rep.argmin_angle:.4f}")
    write_scan_csv(shock, ScanGrid(xi_count=401, theta_count=128, etas=(0.0, 1e-2, 1e-1)), args.out)
    print(f"grid written to {args.out}")


if __name__ == "__main__":
    main()
