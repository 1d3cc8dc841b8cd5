"""Search random constructed systems for violations of the stated period bounds.

For each violation prints the group, seed, first failing n, and whether the
class-uniform variant and the lower bounds still hold.
"""

import argparse
import random
import sys
from collections import Counter

from quotorbits.catalog import SELFTEST_CATALOG, catalog_group
from quotorbits.constructor import build_system, random_spec
from quotorbits.formats import csv_text
from quotorbits.quotient import check_bounds


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cases", type=int, default=50)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args(argv)

    rows, per_group = [], Counter()
    uniform_fail = lower_fail = 0
    for name in SELFTEST_CATALOG:
        G = catalog_group(name)
        for k in range(args.cases):
            spec = random_spec(G, random.Random(f"{args.seed}:{name}:{k}"), max_count=3, max_n=4)
            rep = check_bounds(build_system(spec), args.max_n)
            uniform_fail += not rep.ok_uniform
            lower_fail += not all(r.lower_ok for r in rep.rows)
            if rep.ok:
                continue
            per_group[name] += 1
            r = next(r for r in rep.rows if not r.ok)
            rows.append((name, k, r.n, r.F_quot, r.fixed_upper, r.O_quot, r.orbit_upper, rep.ok_uniform))
    header = ("group", "case", "n", "F'", "F' upper", "O'", "O' upper", "class-uniform ok")
    sys.stdout.write(csv_text(header, rows))
    total = len(SELFTEST_CATALOG) * args.cases
    print(f"# {len(rows)}/{total} violate the stated bounds {dict(per_group)}")
    print(f"# class-uniform failures: {uniform_fail}; lower-bound failures: {lower_fail}")


if __name__ == "__main__":
    main()
