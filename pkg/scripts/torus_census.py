"""Periodic-point counts and channel census for the doubling map on the torus.

Writes two CSV tables to stdout: the F_n counts, then the per-class census.
"""

import argparse
import sys

from quotorbits.formats import csv_text
from quotorbits.torus_oracle import FCOUNT_HEADER, eq9_census, fcounts_rows, shortening_fractions


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=10, help="largest layer for F_n(T)")
    ap.add_argument("--census-n", type=int, default=4)
    args = ap.parse_args(argv)

    sys.stdout.write(csv_text(FCOUNT_HEADER, fcounts_rows(args.max_n)))
    sys.stdout.write("\n")
    rows = []
    for n in range(1, args.census_n + 1):
        c = eq9_census(n)
        for name in c.predicted:
            rows.append((n, name, c.direct.get(name, 0), c.predicted[name], c.direct.get(name, 0) == c.predicted[name]))
        rows.append((n, "Omega points", c.omega_points, 0, c.omega_points == 0))
    sys.stdout.write(csv_text(("n", "class", "direct", "from channels", "match"), rows))
    sys.stdout.write("\n")
    fr = shortening_fractions(args.census_n)
    sys.stdout.write(csv_text(("n", "shortening fraction"), enumerate(fr, 1)))


if __name__ == "__main__":
    main()
