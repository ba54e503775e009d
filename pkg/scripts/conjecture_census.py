"""Rank-1 runaway census for the A_jj, A_1k and A_j1 families at n=160.

Prints a pass/fail table against the conjectured counts: j runaways with
winding j for A_jj, k-1 inward runaways for A_1k.  A_j1 rows are reported
without an expectation.
"""
import argparse
import json

from fhspec import WORKING_PARAMS
from fhspec.rank1 import runaway_census


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=160)
    ap.add_argument("--sigma-max", type=float, default=20.0)
    ap.add_argument("--max-index", type=int, default=5)
    ap.add_argument("--json", help="optional path for the full census records")
    args = ap.parse_args()

    records = []
    print(f"{'family':>6} {'idx':>3} {'count':>5} {'wind':>4} {'in':>3} {'out':>3}  expectation")
    for family in ("jj", "1k", "j1"):
        for idx in range(1 if family == "jj" else 2, args.max_index + 1):
            c = runaway_census(WORKING_PARAMS, args.n, family, idx, sigma_max=args.sigma_max)
            if family == "jj":
                verdict = "ok" if c.count_type_II == idx and c.winding_of_E1 == idx else "MISS"
            elif family == "1k":
                verdict = "ok" if c.inward == idx - 1 else "MISS"
            else:
                verdict = "-"
            print(f"{family:>6} {idx:>3} {c.count_type_II:>5} {c.winding_of_E1:>4} {c.inward:>3} {c.outward:>3}  {verdict}")
            records.append(c.to_json())
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(records, fh, indent=2)


if __name__ == "__main__":
    main()
