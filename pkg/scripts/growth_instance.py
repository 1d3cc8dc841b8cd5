"""Realize a growth-rate instance and print counts and empirical exponents as CSV."""

import argparse
import math
import sys
from fractions import Fraction

from quotorbits.catalog import catalog_group
from quotorbits.formats import csv_text
from quotorbits.realizer import corollary12_instance, realize_and_verify


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="D8")
    ap.add_argument("--lam", default="2")
    ap.add_argument("--eta", default="4")
    ap.add_argument("--c", default="1")
    ap.add_argument("-M", type=int, default=8)
    args = ap.parse_args(argv)

    lam, eta = Fraction(args.lam), Fraction(args.eta)
    pair = corollary12_instance(catalog_group(args.group), lam, eta, Fraction(args.c), args.M)
    rep = realize_and_verify(pair)
    g = rep.growth
    rows = []
    for n in range(1, args.M + 1):
        rows.append((
            n, pair.a[n - 1], rep.observed_a[n - 1], pair.b[n - 1], rep.observed_b[n - 1],
            g.o_exponents[n - 1], g.o_exponents_quot[n - 1], g.f_exponents[n - 1], g.f_exponents_quot[n - 1],
        ))
    header = ("n", "a_n", "O_n(T)", "b_n", "O_n(T')", "logO/n", "logO'/n", "logF/n", "logF'/n")
    sys.stdout.write(csv_text(header, rows))
    print(f"# N={pair.N} points={rep.points} exact={rep.ok} log(lambda)={math.log(lam):.6f} log(eta)={math.log(eta):.6f}")
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
