"""Run the acceptance criteria and print one line per criterion.

    python scripts/run_acceptance.py [--seed N] [--only K ...]
"""

import argparse
import sys

from mapcone import acceptance


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    ap.add_argument("--only", type=int, action="append", choices=sorted(acceptance.CRITERIA))
    args = ap.parse_args(argv)
    ok = True
    for n in args.only or sorted(acceptance.CRITERIA):
        r = acceptance.CRITERIA[n](args.seed)
        print(f"{r.line()}  ({r.seconds:.2f} s)", flush=True)
        ok &= r.ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
