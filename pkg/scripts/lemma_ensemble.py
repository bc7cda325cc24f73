"""Main-Lemma ratio Area / (alpha (1-t)^2) over the frozen general ensemble."""
import argparse
import math

from _common import emit, load_ensemble

from argsector.arcs import main_lemma_check
from argsector.sectors import Sector


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=float, default=0.5)
    ap.add_argument("--theta1", type=float, default=0.0)
    ap.add_argument("--alpha", type=float, default=math.pi / 2)
    ap.add_argument("--radial-samples", type=int, default=16)
    ap.add_argument("--err", type=float, default=2e-3)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    S = Sector(args.theta1, args.alpha)
    rows = []
    for item, f in load_ensemble("general"):
        coarse = main_lemma_check(f, args.t, S, args.radial_samples, args.err)
        fine = main_lemma_check(f, args.t, S, 2 * args.radial_samples, args.err / 2)
        rows.append([item["id"], str(coarse.hypotheses_hold), coarse.omega_inf,
                     coarse.omega_big_t, coarse.omega_big_1, coarse.raw_ratio, fine.raw_ratio])
    emit(rows, ["id", "hypotheses", "omegaInf", "OmegaT", "Omega1", "ratio", "ratioRefined"],
         args.out)
    kept = [(r[5], r[6]) for r in rows if r[1] == "True"]
    if kept:
        print(f"# {len(kept)} cases; min ratio {min(k[0] for k in kept)!r}, "
              f"refined {min(k[1] for k in kept)!r}")


if __name__ == "__main__":
    main()
