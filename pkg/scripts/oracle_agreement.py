"""Compare the closed-form verdict with the spectral scan on seeded random shocks.

Usage: python scripts/oracle_agreement.py [--count 200] [--seed 2024] [--sampler dimensionless|physical]
"""

import argparse
import time

from elastoshock import Verdict, classify, scan_stability
from elastoshock.sampling import dimensionless_shock, physical_shock


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--sampler", choices=("dimensionless", "physical"), default="dimensionless")
    args = ap.parse_args()
    draw = dimensionless_shock if args.sampler == "dimensionless" else physical_shock

    t0 = time.perf_counter()
    counts = {"agree": 0, "disagree": 0, "band": 0, "weak": 0}
    for i in range(args.count):
        shock = draw(args.seed, i)
        a, b = classify(shock), scan_stability(shock)
        counts["weak"] += a.verdict is Verdict.WEAK
        if abs(a.min_margin) <= 1e-3 * shock.Mstar**4:
            counts["band"] += 1
        elif a.verdict == b.verdict:
            counts["agree"] += 1
        else:
            counts["disagree"] += 1
            print(f"  #{i}: analytic {a.verdict.value} margin {a.min_margin:.3e}, "
                  f"scan {b.verdict.value} rel {b.min_margin:.3e}")
    print(f"{args.count} shocks in {time.perf_counter() - t0:.0f} s: {counts}")


if __name__ == "__main__":
    main()
