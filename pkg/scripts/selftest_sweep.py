"""Run the CLI selftest over several seeds and tabulate the outcome."""

import argparse
import io
import json
import sys

from quotorbits.cli import run
from quotorbits.formats import csv_text


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--cases", type=int, default=50)
    args = ap.parse_args(argv)

    rows, worst = [], 0
    for seed in range(args.seeds):
        buf = io.StringIO()
        code = run(["--format", "json", "selftest", "--seed", str(seed), "--cases", str(args.cases)], stdout=buf)
        worst = max(worst, code)
        for r in json.loads(buf.getvalue())["sections"][f"selftest seed={seed}"]:
            rows.append((seed, r["group"], r["cases"], r["round trips ok"], r["lemma suites ok"]))
    sys.stdout.write(csv_text(("seed", "group", "cases", "round trips ok", "lemma suites ok"), rows))
    return worst


if __name__ == "__main__":
    sys.exit(main())
