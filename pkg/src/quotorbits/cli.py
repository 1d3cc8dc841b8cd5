"""Command-line entry point: ``quotorbits <subcommand> ...``.

Exit status is 0 when every check passes, 1 when a property fails and 2 on
usage or input errors. Output is deterministic for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from . import formats
from .catalog import SELFTEST_CATALOG, catalog_group
from .constructor import build_system, random_spec, verify_construction
from .dynsys import validate_system
from .group_core import (
    GroupError,
    conjugacy_classes_of_subgroups,
    enumerate_subgroups,
    normalizer,
    sigma_table,
)
from .quotient import behavior_census, check_bounds, lemma_suite, min_glue_by_delta
from .realizer import (
    CaseViolation,
    Infeasible,
    PreconditionViolation,
    SequencePair,
    corollary12_instance,
    realize_and_verify,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    paths: list[str] = field(default_factory=list)
    horizon: Optional[int] = None
    fmt: str = "table"
    seed: Optional[int] = None


@dataclass
class Section:
    title: str
    header: Sequence[str]
    rows: list[Sequence[Any]]


@dataclass
class Output:
    sections: list[Section] = field(default_factory=list)
    messages: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    def add(self, title: str, header: Sequence[str], rows) -> None:
        self.sections.append(Section(title, tuple(header), [tuple(r) for r in rows]))

    def fail(self, prop: str, witness: str) -> None:
        self.failures.append(f"{prop}: {witness}")

    @property
    def ok(self) -> bool:
        return not self.failures


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def render(out: Output, fmt: str) -> str:
    if fmt == "json":
        obj = {
            "ok": out.ok,
            "sections": {
                s.title: [dict(zip(s.header, formats.to_jsonable(list(r)))) for r in s.rows] for s in out.sections
            },
            "messages": out.messages,
            "failures": out.failures,
        }
        return json.dumps(formats.to_jsonable(obj), indent=2, sort_keys=False) + "\n"
    parts = []
    for s in out.sections:
        if fmt == "csv":
            parts.append(f"# {s.title}\n" + formats.csv_text(s.header, [[_cell(v) for v in r] for r in s.rows]))
            continue
        cells = [list(s.header)] + [[_cell(v) for v in r] for r in s.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(s.header))]
        lines = [s.title]
        for k, r in enumerate(cells):
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
            if k == 0:
                lines.append("  ".join("-" * w for w in widths))
        parts.append("\n".join(lines) + "\n")
    tail = [f"note: {m}" for m in out.messages] + [f"FAIL {m}" for m in out.failures]
    tail.append("all checks passed" if out.ok else f"{len(out.failures)} check(s) failed")
    if fmt == "csv":
        return "".join(parts) + "".join(f"# {t}\n" for t in tail)
    return "\n".join(parts) + "\n".join(tail) + "\n"


def _group_arg(ref: str):
    try:
        return formats.load_group(ref)
    except FileNotFoundError as exc:
        raise UsageError(str(exc))


def _labels(G, elements) -> str:
    return "{" + ",".join(G.labels[g] for g in elements) + "}"


def _pairs(chans) -> str:
    return ",".join(f"({d},{t})" for d, t in chans)


# --- subcommands ----------------------------------------------------------------


def cmd_group(args, out: Output) -> None:
    G = _group_arg(args.file)
    classes = conjugacy_classes_of_subgroups(G)
    out.add(
        f"group {G.name or args.file}: order {G.order}, {len(enumerate_subgroups(G))} subgroups, {len(classes)} classes",
        ("class", "order", "conjugates", "normalizer", "representative"),
        [
            (c.id, c.representative.order, len(c.members), normalizer(G, c.representative).order,
             _labels(G, c.representative))
            for c in classes
        ],
    )
    sig = sigma_table(G)
    if args.sigma:
        out.add("admissible (delta,theta) per class", ("class", "order", "channels"),
                [(c, classes[c].representative.order, _pairs(sig[c])) for c in sorted(sig.channels)])
    if args.invariants:
        out.add("invariants", ("quantity", "value"), [
            ("largest element order", sig.nabla),
            ("maximal-shortening class", sig.h_nabla_class),
            ("its representative", _labels(G, classes[sig.h_nabla_class].representative)),
            ("minimal glue at maximal shortening", sig.theta_cap),
            ("smallest glue per shortening factor", _pairs(min_glue_by_delta(sig).items())),
        ])


def _report_lemmas(sys_, N, out: Output) -> None:
    rep = lemma_suite(sys_, N)
    for prop, witness in rep.violations[:20]:
        out.fail(prop, witness)
    out.messages.append(f"lemma suite: {rep.orbits_checked} orbits checked, {len(rep.violations)} violations")


def _bounds_section(sys_, N, out: Output, title: str) -> None:
    rep = check_bounds(sys_, N)
    out.add(title, ("n", "F", "F'", "F' lower", "F' upper", "F' upper*", "O", "O'", "O' lower", "O' upper", "O' upper*"),
            [(r.n, r.F, r.F_quot, r.fixed_lower, r.fixed_upper, r.fixed_upper_uniform, r.O, r.O_quot,
              r.orbit_lower, r.orbit_upper, r.orbit_upper_uniform) for r in rep.rows])
    for prop, witness in rep.violations():
        out.fail(prop, witness)
    uni = rep.violations(uniform=True)
    for prop, witness in uni:
        out.fail(prop, witness)
    out.messages.append("columns marked * use the smallest glue count over all classes for each shortening factor")


def cmd_system(args, out: Output) -> None:
    try:
        sys_ = formats.load_system(Path(args.file))
    except (FileNotFoundError, ValueError, KeyError, GroupError) as exc:
        raise UsageError(f"cannot read system: {exc}")
    val = validate_system(sys_)
    if not val.ok:
        for m in val.messages()[:20]:
            out.fail("valid system", m)
        return
    N = args.max_n
    out.messages.append(f"{sys_.size} points, group of order {sys_.group.order}")
    _report_lemmas(sys_, N, out)
    if args.classify:
        census = behavior_census(sys_, N, strict=False)
        out.add("orbit channels", ("n", "class", "delta", "theta", "count"),
                [(n, c, d, t, v) for (c, d, t, n), v in sorted(census.counts.items(), key=lambda kv: (kv[0][3], kv[0]))])
        out.add("orbit counts", ("n", "O_n(T)", "O_n(T')", "F_n(T)", "F_n(T')"),
                [(n, census.upstairs.O[n - 1], census.quotient.O[n - 1], census.upstairs.F[n - 1], census.quotient.F[n - 1])
                 for n in range(1, N + 1)])
    if args.bounds:
        _bounds_section(sys_, N, out, "period bounds")


def cmd_construct(args, out: Output) -> None:
    G = _group_arg(args.group)
    try:
        spec = formats.load_spec(Path(args.spec), group=G)
    except (FileNotFoundError, KeyError) as exc:
        raise UsageError(f"cannot read spec: {exc}")
    except ValueError as exc:
        raise UsageError(f"invalid spec: {exc}")
    sys_ = build_system(spec)
    out.messages.append(f"built {sys_.size} points from {len(spec.entries)} spec entries")
    if args.emit:
        Path(args.emit).write_text(json.dumps(formats.system_to_json(sys_, args.group)) + "\n")
        out.messages.append(f"system written to {args.emit}")
    if args.verify:
        rep = verify_construction(spec, args.max_n, sys_)
        out.add("predicted and observed orbit counts", ("n", "a_n", "O_n(T)", "b_n", "O_n(T')"),
                [(n, rep.predicted_a[n - 1], rep.observed_a[n - 1], rep.predicted_b[n - 1], rep.observed_b[n - 1])
                 for n in range(1, args.max_n + 1)])
        if not rep.valid_system:
            out.fail("valid system", "constructed system failed validation")
        for n in range(1, args.max_n + 1):
            if rep.predicted_a[n - 1] != rep.observed_a[n - 1]:
                out.fail("upstairs counts", f"n={n}: {rep.observed_a[n - 1]} != {rep.predicted_a[n - 1]}")
            if rep.predicted_b[n - 1] != rep.observed_b[n - 1]:
                out.fail("quotient counts", f"n={n}: {rep.observed_b[n - 1]} != {rep.predicted_b[n - 1]}")
        for m in rep.channel_mismatches:
            out.fail("channel census", m)


def _realization(pair: SequencePair, out: Output, emit: Optional[str], group_ref: str) -> None:
    try:
        rep = realize_and_verify(pair)
    except Infeasible as exc:
        out.fail("sequence split", f"{exc} [n={exc.n}, residual={exc.residual}]")
        return
    out.add("split", ("n", "method", "channels"),
            [(s.n, s.method, " ".join(f"{c}:{_pairs([(d, t)])}x{v}" for (c, d, t), v in sorted(s.entries.items())))
             for s in rep.steps])
    out.add("realized counts", ("n", "a_n", "O_n(T)", "b_n", "O_n(T')"),
            [(n, pair.a[n - 1], rep.observed_a[n - 1], pair.b[n - 1], rep.observed_b[n - 1]) for n in range(1, rep.M + 1)])
    if rep.growth is not None:
        g = rep.growth
        out.add("empirical exponents (1/n) log", ("n", "O_n(T)", "O_n(T')", "F_n(T)", "F_n(T')"),
                [(n, g.o_exponents[n - 1], g.o_exponents_quot[n - 1], g.f_exponents[n - 1], g.f_exponents_quot[n - 1])
                 for n in range(1, rep.M + 1)])
        out.messages.append("exponents are finite-prefix diagnostics")
    if pair.flagged:
        out.messages.append(f"upper condition unchecked (a too short) at n = {list(pair.flagged)}")
    out.messages.append(f"{rep.points} points")
    for m in rep.mismatches():
        out.fail("realized counts", m)
    if emit:
        from .realizer import split_sequences

        Path(emit).write_text(json.dumps(formats.spec_to_json(split_sequences(pair), group_ref)) + "\n")
        out.messages.append(f"spec written to {emit}")


def cmd_realize(args, out: Output) -> None:
    G = _group_arg(args.group)
    try:
        a, b = formats.read_pairs_csv(Path(args.pairs))
    except (FileNotFoundError, ValueError) as exc:
        raise UsageError(f"cannot read pairs: {exc}")
    if args.max_n is not None:
        b = b[: args.max_n]
    try:
        pair = SequencePair(tuple(a), tuple(b), args.crossover, G)
    except PreconditionViolation as exc:
        raise UsageError(f"sequence hypotheses fail: {exc}")
    _realization(pair, out, args.emit, args.group)


def cmd_cor12(args, out: Output) -> None:
    G = _group_arg(args.group)
    try:
        pair = corollary12_instance(G, Fraction(args.lam), Fraction(args.eta), Fraction(args.c), args.max_n)
    except (CaseViolation, PreconditionViolation, ValueError) as exc:
        raise UsageError(str(exc))
    out.messages.append(f"crossover N = {pair.N}")
    if args.no_build:
        out.add("sequences", ("n", "a_n", "b_n"), [(n, pair.a[n - 1], pair.b[n - 1]) for n in range(1, pair.M + 1)])
        return
    _realization(pair, out, None, args.group)


def cmd_torus(args, out: Output) -> None:
    from . import torus_oracle as tor

    N = args.max_n
    try:
        if args.check == "fcounts":
            rows = tor.fcounts_rows(N)
            out.add("periodic points of doubling and of its quotient", tor.FCOUNT_HEADER, rows)
            for r in rows:
                if not r[5]:
                    out.fail("fixed-point count", f"n={r[0]}: F_n(T)={r[1]} != {r[2]}")
                if r[6] is False:
                    out.fail("quotient fixed-point count", f"n={r[0]}: {r[3]} != {r[4]}")
        elif args.check == "quotient":
            rows = []
            for n in range(1, N + 1):
                sizes = tor.twisted_fixed_sizes(n)
                Fq = tor.quotient_fixed_count(n)
                cross = tor.quotient_fixed_count_by_layer(n) if n <= 2 else None
                det_ok = all(a == b for a, b in sizes.values())
                rows.append((n, Fq, 4**n, cross, det_ok))
                if Fq != 4**n or (cross is not None and cross != Fq):
                    out.fail("quotient fixed-point count", f"n={n}: congruences {Fq}, layer {cross}, expected {4**n}")
                if not det_ok:
                    out.fail("congruence solution count", f"n={n}: {sizes}")
            out.add("quotient fixed points", ("n", "by congruences", "4^n", "by layer 4n", "sizes = |det|"), rows)
        elif args.check == "eq9":
            rows = []
            for n in range(1, N + 1):
                c = tor.eq9_census(n)
                for name in tor.DISPLAYED_CHANNELS:
                    chans = " ".join(f"{_pairs([(d, t)])}:{c.channel_counts.get((name, d, t), 0)}"
                                     for d, t in tor.DISPLAYED_CHANNELS[name])
                    rows.append((n, name, c.direct.get(name, 0), c.predicted[name], chans))
                    if c.direct.get(name, 0) != c.predicted[name]:
                        out.fail("quotient decomposition", f"n={n}, class {name}: {c.direct.get(name, 0)} != {c.predicted[name]}")
                for s in c.stray_channels:
                    out.fail("unexpected channel", f"n={n}: {s}")
                if c.omega_points:
                    out.fail("empty Omega piece", f"n={n}: {c.omega_points} periodic points with stabilizer class Omega")
            out.add("quotient orbits by class: direct count and channel sum", ("n", "class", "direct", "channel sum", "upstairs channels"), rows)
            fr = tor.shortening_fractions(N)
            mono = all(x >= y for x, y in zip(fr, fr[1:]))
            out.add("fraction of orbits of length <= n that shorten", ("n", "fraction"), [(n, f) for n, f in enumerate(fr, 1)])
            out.messages.append(f"shortening fraction nonincreasing over 1..{N}: {'yes' if mono else 'no'} (diagnostic only)")
        elif args.check == "triangle":
            rows = []
            for n in range(1, N + 1):
                pts = [p for p in tor.layer_points(n) if p.in_domain()]
                bad = 0
                for p in pts:
                    img = tor.triangle_map(p)
                    if not img.in_domain() or img != tor.fold(p.double()):
                        bad += 1
                        out.fail("triangle map", f"{p} -> {img}, fold of doubled point {tor.fold(p.double())}")
                rows.append((n, len(pts), bad))
            out.add("triangle map on layer points of the fundamental domain", ("n", "points", "mismatches"), rows)
        else:
            rows = []
            for n in range(1, N + 1):
                rep = tor.verify_semiconjugacy(n)
                rows.append((n, rep.points, len(rep.failures)))
                for f in rep.failures:
                    out.fail("semi-conjugacy", f)
            out.add("canonical(T v) = triangle(canonical v)", ("n", "points", "failures"), rows)
    except tor.HorizonGuard as exc:
        raise UsageError(str(exc))


def cmd_selftest(args, out: Output) -> None:
    rows = []
    for name in SELFTEST_CATALOG:
        G = catalog_group(name)
        ok_build = ok_lemma = ok_bounds = 0
        for k in range(args.cases):
            rng = random.Random(f"{args.seed}:{name}:{k}")
            spec = random_spec(G, rng, max_count=3, max_n=4)
            sys_ = build_system(spec)
            rep = verify_construction(spec, args.max_n, sys_)
            if rep.ok:
                ok_build += 1
            else:
                out.fail("round trip", f"{name} case {k}: {rep.channel_mismatches[:1] or 'count mismatch'}")
            lem = lemma_suite(sys_, args.max_n)
            if lem.ok:
                ok_lemma += 1
            else:
                prop, witness = lem.violations[0]
                out.fail(prop, f"{name} case {k}: {witness}")
            if args.bounds:
                b = check_bounds(sys_, 8)
                if b.ok:
                    ok_bounds += 1
                else:
                    prop, witness = b.violations()[0]
                    out.fail(prop, f"{name} case {k}: {witness}")
        rows.append((name, args.cases, ok_build, ok_lemma, ok_bounds if args.bounds else None))
    out.add(f"selftest seed={args.seed}", ("group", "cases", "round trips ok", "lemma suites ok", "bounds ok"), rows)


# --- parser -------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quotorbits", description="Orbit behaviour of finite systems under finite group actions.")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("group", help="subgroup classes and admissible channels")
    g.add_argument("file", help="group JSON file or catalog name")
    g.add_argument("--sigma", action="store_true")
    g.add_argument("--invariants", action="store_true")

    s = sub.add_parser("system", help="validate and census a system file")
    s.add_argument("file")
    s.add_argument("--classify", action="store_true")
    s.add_argument("--bounds", action="store_true")
    s.add_argument("--max-n", type=_positive, default=8)

    c = sub.add_parser("construct", help="build a system from a behavior spec")
    c.add_argument("group")
    c.add_argument("spec")
    c.add_argument("--verify", action="store_true")
    c.add_argument("--max-n", type=_positive, default=12)
    c.add_argument("--emit", metavar="OUT")

    r = sub.add_parser("realize", help="split a pair of count sequences and realize it")
    r.add_argument("group")
    r.add_argument("--pairs", required=True, help="CSV rows n,a_n,b_n")
    r.add_argument("--crossover", type=_positive, required=True)
    r.add_argument("--max-n", type=_positive)
    r.add_argument("--emit", metavar="OUT")

    k = sub.add_parser("cor12", help="growth-rate instance with prescribed exponents")
    k.add_argument("group")
    k.add_argument("--lambda", dest="lam", required=True)
    k.add_argument("--eta", required=True)
    k.add_argument("--c", required=True)
    k.add_argument("--max-n", type=_positive, default=8)
    k.add_argument("--no-build", action="store_true", help="only print the sequences")

    t = sub.add_parser("torus", help="doubling map on the torus under D8")
    t.add_argument("--max-n", type=_positive, default=4)
    t.add_argument("--check", choices=("fcounts", "quotient", "eq9", "triangle", "semiconj"), default="fcounts")

    st = sub.add_parser("selftest", help="random spec round trips and lemma suites")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--cases", type=_positive, default=50)
    st.add_argument("--max-n", type=_positive, default=12)
    st.add_argument("--bounds", action="store_true", help="also check the stated period bounds")
    for sp in (g, s, c, r, k, t, st):
        sp.add_argument("--format", choices=("table", "csv", "json"), default=argparse.SUPPRESS)
    return p


COMMANDS = {
    "group": cmd_group,
    "system": cmd_system,
    "construct": cmd_construct,
    "realize": cmd_realize,
    "cor12": cmd_cor12,
    "torus": cmd_torus,
    "selftest": cmd_selftest,
}


def config_from_args(args) -> RunConfig:
    paths = [getattr(args, k) for k in ("file", "group", "spec", "pairs") if getattr(args, k, None)]
    return RunConfig(args.command, paths, getattr(args, "max_n", None), args.format, getattr(args, "seed", None))


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        out = Output()
        COMMANDS[cfg.subcommand](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except GroupError as exc:
        print(f"input error: {exc}", file=stderr)
        return EXIT_USAGE
    stdout.write(render(out, cfg.fmt))
    return EXIT_OK if out.ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
