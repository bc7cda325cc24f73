"""Regenerate the frozen random ensembles used by the test suite.

Zeros are drawn uniformly from the disc of radius 3/4 with a recorded seed.
Running this script again reproduces tests/fixtures/ensembles.json exactly.
"""
import argparse
import json
import math
from pathlib import Path

import numpy as np

from argsector.functions import ZeroEntry, ZeroProduct
from argsector.specio import FunctionSpecDocument, document_to_object

SEED = 20240611
ZERO_RADIUS = 0.75


def random_zeros(rng, n):
    rad = ZERO_RADIUS * np.sqrt(rng.random(n))
    ang = 2 * math.pi * rng.random(n)
    return rad * np.exp(1j * ang)


def as_doc(zeros, origin=False):
    entries = [ZeroEntry(complex(z), 1) for z in zeros]
    if origin:
        entries.insert(0, ZeroEntry(0.0, 1))
    return document_to_object(FunctionSpecDocument(ZeroProduct(tuple(entries)), order=0.0))


def build(seed=SEED):
    rng = np.random.default_rng(seed)
    general = []
    for i in range(50):
        deg = (4, 8, 12)[i % 3]
        general.append({"id": f"gen{i:02d}", "degree": deg,
                        "spec": as_doc(random_zeros(rng, deg)),
                        "radii": [0.3, 0.6, 0.9]})
    vanishing = []
    for i in range(100):
        deg = (4, 8, 12, 20)[i % 4]
        vanishing.append({"id": f"van{i:03d}", "degree": deg,
                          "spec": as_doc(random_zeros(rng, deg - 1), origin=True)})
    oracle_cases = []
    for i in range(20):
        oracle_cases.append({"function": f"gen{int(rng.integers(50)):02d}",
                             "r": float(np.round(rng.uniform(0.3, 1.2), 6)),
                             "theta1": float(np.round(rng.uniform(0, 2 * math.pi), 6)),
                             "alpha": float(np.round(rng.uniform(0.3, 2 * math.pi - 0.3), 6))})
    return {"seed": seed, "zeroRadius": ZERO_RADIUS, "general": general,
            "vanishing": vanishing, "oracleCases": oracle_cases}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1]
                                         / "tests" / "fixtures" / "ensembles.json"))
    args = ap.parse_args()
    Path(args.out).write_text(json.dumps(build(), indent=1) + "\n", encoding="utf-8")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
