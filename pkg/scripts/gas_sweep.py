"""Uniform/weak stability map over (M, R) and its distance from M^2 (R - 1) = 1.

Usage: python scripts/gas_sweep.py [--n 200] [--F "0 0 0 0 0 0 0 0 0"] [--out sweep_map.csv]

With the default F = 0 this is the gas-dynamics limit; pass a nonzero F
(row-major, 9 numbers) to see how elasticity moves the boundary.
"""

import argparse
import csv
import time

import numpy as np

from elastoshock import DimensionlessShock, Verdict, classify


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--F", default="0 0 0 0 0 0 0 0 0")
    ap.add_argument("--out", default="sweep_map.csv")
    args = ap.parse_args()

    F = np.array([float(x) for x in args.F.split()]).reshape(3, 3)
    M1 = float(np.linalg.norm(F[0]))
    Ms = np.sqrt(1 + M1**2)
    formal = np.linalg.det(F) <= 0
    Ms_grid = np.linspace(M1 + 0.01 * (Ms - M1), Ms - 0.01 * (Ms - M1), args.n)
    Rs = np.linspace(1.01, 8.0, args.n)

    t0 = time.perf_counter()
    rows = []
    for M in Ms_grid:
        Mt = np.sqrt(M * M - M1 * M1)
        for R in Rs:
            shock = DimensionlessShock(float(M), float(2 * M / Mt), float(R), F, formal=formal)
            rep = classify(shock, scan_points=64)
            rows.append((M, R, rep.verdict.value, rep.min_margin))
    elapsed = time.perf_counter() - t0

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["M", "R", "verdict", "min_margin"])
        w.writerows(rows)

    uniform = sum(r[2] == Verdict.UNIFORM.value for r in rows)
    print(f"{len(rows)} cells in {elapsed:.1f} s, {uniform} uniformly stable -> {args.out}")
    if not np.any(F):
        off = [(M, R) for M, R, v, _ in rows if (v == Verdict.UNIFORM.value) != (M * M * (R - 1) < 1)]
        print(f"cells disagreeing with M^2 (R - 1) < 1: {len(off)}")


if __name__ == "__main__":
    main()
