"""Deviation from alpha/2pi at the order-zero analysis radius for growing U."""
import argparse
import math

from _common import emit

from argsector.functions import CanonicalProduct, Fryntov, build_function
from argsector.harness import order_zero_trend, trend_non_increasing


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", choices=["canonical", "fryntov"], default="canonical")
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--U", default="3,10,30")
    ap.add_argument("--err", type=float, default=4e-3)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    if args.family == "canonical":
        mods = tuple((10.0 ** k, int(math.floor(10 ** (k / 2) + 1e-12))) for k in range(5))
        f = build_function(CanonicalProduct(mods))
    else:
        f = build_function(Fryntov(10.0, 0.5, 3))
    Us = [float(u) for u in args.U.split(",")]
    pts = order_zero_trend(f, args.delta, Us, err_budget=args.err)
    emit([[p.U, p.r_delta, p.analysis_radius, p.max_deviation, p.max_deviation_mid,
           p.max_undecided, str(p.certified)] for p in pts],
         ["U", "rDelta", "R", "maxDeviation", "maxDeviationMid", "maxUndecided", "certified"],
         args.out)
    print(f"# non-increasing within estimator tolerance: {trend_non_increasing(pts)}")


if __name__ == "__main__":
    main()
