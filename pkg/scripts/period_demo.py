"""Period maps of the shipped Dolbeault-type models over K[t]/(t^k).

Prints the image of H*(F^p) in H*(A) ⊗ B, whether it is a free lift of
H*(F^p), and where transversality is sharp.
"""

import argparse
from fractions import Fraction

from mapcone.artin import standard
from mapcone.period import (
    GaussManinSetup, filtration_injective, period_map, shipped_model, transversality_check,
)

XI = {
    "elliptic": {("dzb.d/dz", "t"): Fraction(1)},
    "torus2": {("dzb1.d/dz1", "t"): Fraction(1), ("dzb2.d/dz1", "t"): Fraction(2)},
    "affine": {("q1.d/p1", "t"): Fraction(1)},
}


def main():
    ap = argparse.ArgumentParser(description="period maps of the shipped models")
    ap.add_argument("--artin", default="t2")
    args = ap.parse_args()
    B = standard(args.artin)
    for name, xi in XI.items():
        model = shipped_model(name)
        print(f"== {name}  ({', '.join(model.holo + model.anti)})")
        for p in range(model.top_holomorphic + 1):
            if not filtration_injective(model, p):
                print(f"  p={p}: H*(F^p) -> H*(A) not injective, skipped")
                continue
            res = period_map(model, p, B, xi)
            rep = transversality_check(GaussManinSetup(B), model, xi, p)
            print(f"  p={p}: {res.generators()}  transversality {'ok' if rep.ok else 'FAILS'}"
                  f"{', sharp' if rep.sharp else ''}")


if __name__ == "__main__":
    main()
