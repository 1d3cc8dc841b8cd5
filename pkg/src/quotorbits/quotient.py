"""Quotient systems (X', T') and how closed orbits behave when passing to them.

Every closed orbit of T either survives, glues with other orbits, shortens,
or glues and shortens. The census groups orbits into channels
(stabilizer class, delta, theta) and checks the counting identities that tie
upstairs and downstairs orbit counts together.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .dynsys import (
    FiniteDynSystem,
    OrbitRecord,
    PeriodCounts,
    counts_from_lengths,
    cycle_labels,
    group_orbit_labels,
    orbits,
    perm_period_counts,
    stabilizer_classes,
    stabilizer_masks,
)
from .group_core import (
    coset_order,
    conjugacy_classes_of_subgroups,
    quotient_delta_set,
    sigma_table,
    subgroup_from_mask,
)


class IllDefinedInducedMap(ValueError):
    def __init__(self, x: int):
        self.witness = x
        super().__init__(f"induced map is ill-defined at point {x}; the action does not commute with T")


class DecompositionMismatch(AssertionError):
    pass


class LemmaViolation(AssertionError):
    pass


class HorizonTooSmall(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuotientSystem:
    """G-orbits of a system, numbered by increasing smallest member."""

    representatives: np.ndarray
    projection: np.ndarray
    Tprime: np.ndarray
    class_sizes: np.ndarray

    @property
    def size(self) -> int:
        return len(self.representatives)

    def classes(self) -> list[tuple[int, ...]]:
        order = np.argsort(self.projection, kind="stable")
        bounds = np.cumsum(self.class_sizes)[:-1]
        return [tuple(part.tolist()) for part in np.split(order, bounds)]


def build_quotient(sys: FiniteDynSystem) -> QuotientSystem:
    label = group_orbit_labels(sys.action_tables)
    reps = np.flatnonzero(label == np.arange(sys.size))
    proj = np.searchsorted(reps, label)
    Tprime = proj[sys.T[reps]]
    bad = np.flatnonzero(proj[sys.T] != Tprime[proj])
    if len(bad):
        raise IllDefinedInducedMap(int(bad[0]))
    for a in (reps, proj, Tprime):
        a.setflags(write=False)
    return QuotientSystem(reps, proj, Tprime, np.bincount(proj, minlength=len(reps)))


def quotient_period_counts(q: QuotientSystem, N: int) -> PeriodCounts:
    return perm_period_counts(q.Tprime, N)


# --- per-orbit classification ---------------------------------------------

SURVIVING = "surviving"
GLUEING = "glueing"
SHORTENING = "shortening"
BOTH = "glueing_and_shortening"


def behavior_kind(delta: int, theta: int) -> str:
    if delta == 1:
        return SURVIVING if theta == 1 else GLUEING
    return SHORTENING if theta == 1 else BOTH


@dataclass(frozen=True)
class OrbitBehavior:
    orbit: OrbitRecord
    class_id: int
    delta: int
    theta: int
    kind: str
    # element g with T^(length/delta)(x) = g(x), x the orbit representative
    witness: int


class _Context:
    """Per-system data shared by orbit-level checks."""

    def __init__(self, sys: FiniteDynSystem, quotient: Optional[QuotientSystem] = None):
        self.sys = sys
        self.G = sys.group
        self.full = sys.full_action
        self.q = quotient or build_quotient(sys)
        self.qlabel, self.qlen = cycle_labels(self.q.Tprime)
        self.masks = stabilizer_masks(sys)
        self.classes = conjugacy_classes_of_subgroups(self.G)
        self.sigma = sigma_table(self.G)
        self._qdelta: dict[int, frozenset[int]] = {}

    def quotient_delta(self, mask: int) -> frozenset[int]:
        if mask not in self._qdelta:
            self._qdelta[mask] = quotient_delta_set(self.G, subgroup_from_mask(self.G, mask))
        return self._qdelta[mask]


def _examine(ctx: _Context, orbit: OrbitRecord) -> tuple[OrbitBehavior, list[tuple[str, str]]]:
    """Classify an orbit directly and cross-check it against the lemmas."""
    G, full = ctx.G, ctx.full
    x = orbit.representative
    problems: list[tuple[str, str]] = []
    g_orbit = set(full[:, x].tolist())
    t_orbit = set(orbit.points)
    common = t_orbit & g_orbit
    delta = len(common)
    if len(g_orbit) % delta:
        problems.append(("glueing lemma", f"orbit at {x}: |G-orbit| {len(g_orbit)} not divisible by {delta}"))
    theta = len(g_orbit) // delta

    # shortening: downstairs length equals length / |intersection|
    qlen = int(ctx.qlen[ctx.q.projection[x]])
    if orbit.length != delta * qlen:
        problems.append(
            ("shortening lemma", f"orbit at {x}: length {orbit.length}, quotient length {qlen}, intersection {delta}")
        )

    # first return of the T-orbit to the G-orbit, and the element realizing it
    m = next(j for j in range(1, orbit.length + 1) if orbit.points[j % orbit.length] in g_orbit)
    target = orbit.points[m % orbit.length]
    g = next(h for h in G if full[h, x] == target)
    cyc = {x}
    y = int(full[g, x])
    while y != x:
        cyc.add(y)
        y = int(full[g, y])
    if cyc != common:
        problems.append(("shortening lemma (<g>-orbit form)", f"orbit at {x}: <{G.labels[g]}>-orbit differs from intersection"))
    if m != qlen:
        problems.append(("shortening lemma", f"orbit at {x}: first return {m} differs from quotient length {qlen}"))

    # glueing: T-orbits with the same image downstairs
    fiber = ctx.fiber_sizes[ctx.qlabel[ctx.q.projection[x]]]
    if fiber != theta:
        problems.append(("glueing lemma", f"orbit at {x}: {fiber} orbits share its image, expected {theta}"))

    # orbit behaviour: delta is a coset order in N(H)/H, theta = [G:H]/delta
    mask = int(ctx.masks[x])
    H = subgroup_from_mask(G, mask)
    if delta not in ctx.quotient_delta(mask):
        problems.append(("orbit-behaviour lemma", f"orbit at {x}: delta {delta} not an element order of N(H)/H"))
    if G.order // H.order != delta * theta:
        problems.append(("orbit-behaviour lemma", f"orbit at {x}: [G:H]={G.order // H.order} != {delta}*{theta}"))
    try:
        if coset_order(G, H, g) != delta:
            problems.append(("orbit-behaviour lemma", f"orbit at {x}: coset order of witness differs from {delta}"))
    except ValueError:
        problems.append(("orbit-behaviour lemma", f"orbit at {x}: witness {G.labels[g]} does not normalize G_x"))

    if delta > ctx.sigma.nabla:
        problems.append(("maximal shortening", f"orbit at {x}: delta {delta} exceeds largest element order"))
    if len(g_orbit) == 1 and (delta, theta) != (1, 1):
        problems.append(("trivial G-orbit survives", f"orbit at {x}"))

    cid = ctx.classes.class_of_mask(mask)
    if (delta, theta) not in ctx.sigma[cid]:
        problems.append(("admissible channel", f"orbit at {x}: ({delta},{theta}) not admissible for class {cid}"))
    return OrbitBehavior(orbit, cid, delta, theta, behavior_kind(delta, theta), g), problems


def _attach_fibers(ctx: _Context) -> None:
    label, _ = cycle_labels(ctx.sys.T)
    reps = np.flatnonzero(label == np.arange(ctx.sys.size))
    qcyc = ctx.qlabel[ctx.q.projection[reps]]
    ctx.fiber_sizes = Counter(qcyc.tolist())


def _context(sys: FiniteDynSystem) -> _Context:
    ctx = _Context(sys)
    _attach_fibers(ctx)
    return ctx


def classify_orbit(sys: FiniteDynSystem, orbit: OrbitRecord, ctx: Optional[_Context] = None) -> OrbitBehavior:
    ctx = ctx or _context(sys)
    behavior, problems = _examine(ctx, orbit)
    if problems:
        name, msg = problems[0]
        raise LemmaViolation(f"{name}: {msg}")
    return behavior


def classify_all(sys: FiniteDynSystem) -> list[OrbitBehavior]:
    ctx = _context(sys)
    return [classify_orbit(sys, o, ctx) for o in orbits(sys)]


# --- census ---------------------------------------------------------------


@dataclass(frozen=True)
class BehaviorCensus:
    """Orbit counts per channel.

    ``counts[(class_id, delta, theta, n)]`` is the number of T-orbits of
    length n in that channel (only nonzero entries are stored).
    """

    horizon: int
    counts: dict[tuple[int, int, int, int], int]
    upstairs: PeriodCounts
    quotient_counts: tuple[int, ...]
    quotient: PeriodCounts = field(repr=False)

    def channel_count(self, class_id: int, delta: int, theta: int, n: int) -> int:
        return self.counts.get((class_id, delta, theta, n), 0)

    def downstairs_by_channel(self, n: int) -> dict[tuple[int, int, int], Fraction]:
        """Contribution of each channel to O_n(T'), i.e. count at delta*n over theta."""
        out: dict[tuple[int, int, int], Fraction] = {}
        for (c, d, t, m), v in self.counts.items():
            if m == d * n:
                out[(c, d, t)] = out.get((c, d, t), Fraction(0)) + Fraction(v, t)
        return out


def _census_counts(sys: FiniteDynSystem, q: QuotientSystem) -> tuple[Counter, np.ndarray]:
    label, tlen = cycle_labels(sys.T)
    reps = np.flatnonzero(label == np.arange(sys.size))
    _, qlen = cycle_labels(q.Tprime)
    L = tlen[reps]
    down = qlen[q.projection[reps]]
    if np.any(L % down):
        bad = int(reps[np.flatnonzero(L % down)[0]])
        raise DecompositionMismatch(f"shortening lemma: orbit at {bad} has length not divisible by its image length")
    delta = L // down
    gsize = q.class_sizes[q.projection[reps]]
    if np.any(gsize % delta):
        bad = int(reps[np.flatnonzero(gsize % delta)[0]])
        raise DecompositionMismatch(f"glueing lemma: orbit at {bad} has G-orbit size not divisible by delta")
    theta = gsize // delta
    cls = stabilizer_classes(sys)[reps]
    counts = Counter(zip(cls.tolist(), delta.tolist(), theta.tolist(), L.tolist()))
    return counts, L


def census_violations(census: BehaviorCensus, sigma=None) -> list[tuple[str, str]]:
    """Check the four counting identities of a census; returns (property, witness) pairs."""
    out: list[tuple[str, str]] = []
    N = census.horizon
    for n in range(1, N + 1):
        total = sum(v for (c, d, t, m), v in census.counts.items() if m == n)
        if total != census.upstairs.O[n - 1]:
            out.append(("upstairs decomposition", f"n={n}: channels sum to {total}, O_n(T)={census.upstairs.O[n - 1]}"))
        down = sum(census.downstairs_by_channel(n).values(), Fraction(0))
        if down != census.quotient_counts[n - 1]:
            out.append(("quotient decomposition", f"n={n}: channels give {down}, O_n(T')={census.quotient_counts[n - 1]}"))
    for (c, d, t, m), v in census.counts.items():
        if v % t:
            out.append(("glue divisibility", f"class {c}, ({d},{t}), n={m}: count {v} not divisible by {t}"))
        if m % d:
            out.append(("shortening divisibility", f"class {c}, ({d},{t}), n={m}: nonzero count with {d} not dividing {m}"))
        if sigma is not None and (d, t) not in sigma[c]:
            out.append(("admissible channel", f"class {c}: ({d},{t}) not admissible"))
    return out


def behavior_census(sys: FiniteDynSystem, N: int, strict: bool = True) -> BehaviorCensus:
    """Channel census of all orbits, checked against the counting identities up to N.

    All orbits are enumerated, so the upstairs horizon needed for the
    downstairs identity (largest delta times N) is always covered.
    """
    q = build_quotient(sys)
    counts, L = _census_counts(sys, q)
    sigma = sigma_table(sys.group)
    upstairs = counts_from_lengths(L, sigma.nabla * N)
    down = quotient_period_counts(q, N)
    census = BehaviorCensus(N, dict(sorted(counts.items())), upstairs, down.O, down)
    if strict:
        problems = census_violations(census, sigma)
        if problems:
            name, msg = problems[0]
            raise DecompositionMismatch(f"{name}: {msg}")
    return census


# --- bounds ---------------------------------------------------------------


@dataclass(frozen=True)
class BoundsRow:
    """Stated bounds for one n, plus the class-uniform upper bounds.

    The stated upper bounds weight each shortening factor delta by the glue
    count of the free channel. Orbits with a nontrivial stabilizer can shorten
    with a smaller glue count, so ``fixed_upper_uniform`` and
    ``orbit_upper_uniform`` use the smallest glue count over all classes
    admitting delta instead.
    """

    n: int
    F: int
    F_quot: int
    fixed_lower: Fraction
    fixed_upper: Fraction
    O: int
    O_quot: int
    orbit_upper: Fraction
    orbit_lower: Optional[Fraction]
    fixed_upper_uniform: Fraction = Fraction(0)
    orbit_upper_uniform: Fraction = Fraction(0)

    @property
    def lower_ok(self) -> bool:
        return self.fixed_lower <= self.F_quot and (self.orbit_lower is None or self.O_quot >= self.orbit_lower)

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.F_quot <= self.fixed_upper and self.O_quot <= self.orbit_upper

    @property
    def ok_uniform(self) -> bool:
        return self.lower_ok and self.F_quot <= self.fixed_upper_uniform and self.O_quot <= self.orbit_upper_uniform

    def slacks(self) -> dict[str, Optional[Fraction]]:
        return {
            "fixed_lower": self.F_quot - self.fixed_lower,
            "fixed_upper": self.fixed_upper - self.F_quot,
            "orbit_upper": self.orbit_upper - self.O_quot,
            "orbit_lower": None if self.orbit_lower is None else self.O_quot - self.orbit_lower,
            "fixed_upper_uniform": self.fixed_upper_uniform - self.F_quot,
            "orbit_upper_uniform": self.orbit_upper_uniform - self.O_quot,
        }


@dataclass(frozen=True)
class BoundsReport:
    rows: tuple[BoundsRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def ok_uniform(self) -> bool:
        return all(r.ok_uniform for r in self.rows)

    def violations(self, uniform: bool = False) -> list[tuple[str, str]]:
        out = []
        for r in self.rows:
            fu = r.fixed_upper_uniform if uniform else r.fixed_upper
            ou = r.orbit_upper_uniform if uniform else r.orbit_upper
            tag = " (class-uniform)" if uniform else ""
            if not r.fixed_lower <= r.F_quot <= fu:
                out.append(("fixed-point bounds" + tag, f"n={r.n}: {r.fixed_lower} <= {r.F_quot} <= {fu} fails"))
            if r.O_quot > ou or (r.orbit_lower is not None and r.O_quot < r.orbit_lower):
                out.append(("orbit-count bounds" + tag, f"n={r.n}: O_n(T')={r.O_quot} outside [{r.orbit_lower}, {ou}]"))
        return out


def min_glue_by_delta(sigma) -> dict[int, int]:
    """For each shortening factor delta > 1, the smallest glue count over all classes."""
    out: dict[int, int] = {}
    for _, d, t in sigma.all_channels():
        if d > 1:
            out[d] = min(out.get(d, t), t)
    return dict(sorted(out.items()))


def bounds_from_counts(up: PeriodCounts, down: PeriodCounts, sigma, order: int, N: int) -> BoundsReport:
    shortening = [(d, t) for d, t in sigma.trivial_class_channels() if d > 1]
    uniform = list(min_glue_by_delta(sigma).items())
    need = max([d for d, _ in shortening + uniform], default=1) * N
    if up.horizon < need or down.horizon < N:
        raise HorizonTooSmall(f"bounds up to {N} need upstairs counts to {need}")
    rows = []
    for n in range(1, N + 1):
        F, O = up.F[n - 1], up.O[n - 1]
        fixed_upper = F + sum((Fraction(up.F[d * n - 1], d * t) for d, t in shortening), Fraction(0))
        orbit_upper = O + sum((Fraction(up.O[d * n - 1], t) for d, t in shortening), Fraction(0))
        fixed_uni = F + sum((Fraction(up.F[d * n - 1], d * t) for d, t in uniform), Fraction(0))
        orbit_uni = O + sum((Fraction(up.O[d * n - 1], t) for d, t in uniform), Fraction(0))
        lower = None if any(n % d == 0 for d, _ in shortening) else Fraction(O, order)
        rows.append(
            BoundsRow(
                n, F, down.F[n - 1], Fraction(F, order), fixed_upper, O, down.O[n - 1], orbit_upper, lower,
                fixed_uni, orbit_uni,
            )
        )
    return BoundsReport(tuple(rows))


def check_bounds(sys: FiniteDynSystem, N: int) -> BoundsReport:
    sigma = sigma_table(sys.group)
    up = perm_period_counts(sys.T, sigma.nabla * N)
    down = quotient_period_counts(build_quotient(sys), N)
    return bounds_from_counts(up, down, sigma, sys.group.order, N)


# --- growth diagnostics ---------------------------------------------------


def _exponents(values, start: int = 1) -> tuple[Optional[float], ...]:
    return tuple(math.log(v) / n if v > 0 else None for n, v in enumerate(values, start))


@dataclass(frozen=True)
class GrowthReport:
    """Empirical exponents (1/n) log F_n and (1/n) log O_n.

    Finite prefixes cannot determine a limsup; everything here is heuristic.
    """

    f_exponents: tuple[Optional[float], ...]
    f_exponents_quot: tuple[Optional[float], ...]
    o_exponents: tuple[Optional[float], ...]
    o_exponents_quot: tuple[Optional[float], ...]
    eta_estimate: Optional[float]
    window: Optional[tuple[float, float]]
    in_window: Optional[bool]
    heuristic: bool = True


def growth_estimate(
    counts: PeriodCounts, counts_quot: PeriodCounts, nabla: Optional[int] = None, tolerance: float = 0.0
) -> GrowthReport:
    N = min(counts.horizon, counts_quot.horizon)
    if N < 4:
        raise HorizonTooSmall("growth estimates need a horizon of at least 4")
    fT = _exponents(counts.F[:N])
    fQ = _exponents(counts_quot.F[:N])
    eta = fT[-1]
    window = in_window = None
    if nabla is not None and eta is not None and fQ[-1] is not None:
        window = (eta - tolerance, nabla * eta + tolerance)
        in_window = window[0] <= fQ[-1] <= window[1]
    return GrowthReport(fT, fQ, _exponents(counts.O[:N]), _exponents(counts_quot.O[:N]), eta, window, in_window)


# --- the lemma suite ------------------------------------------------------


@dataclass
class LemmaReport:
    orbits_checked: int = 0
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_property(self) -> Counter:
        return Counter(name for name, _ in self.violations)


def lemma_suite(sys: FiniteDynSystem, N: Optional[int] = None) -> LemmaReport:
    """Run every orbit-level and counting property on one system."""
    report = LemmaReport()
    ctx = _context(sys)
    masks = ctx.masks
    bad = np.flatnonzero(masks != masks[sys.T])
    for x in bad[:20].tolist():
        report.violations.append(("periodic-set partition", f"G_x differs from G_T(x) at point {x}"))
    proj = ctx.q.projection
    bad = np.flatnonzero(proj[sys.T] != ctx.q.Tprime[proj])
    for x in bad[:20].tolist():
        report.violations.append(("semi-conjugacy", f"projection does not intertwine T at point {x}"))
    for orbit in orbits(sys):
        _, problems = _examine(ctx, orbit)
        report.orbits_checked += 1
        report.violations.extend(problems)
    if N is None:
        N = int(max(ctx.qlen.max(initial=1), 1))
    try:
        census = behavior_census(sys, N, strict=False)
        report.violations.extend(census_violations(census, ctx.sigma))
    except DecompositionMismatch as exc:
        report.violations.append(("census", str(exc)))
    return report
