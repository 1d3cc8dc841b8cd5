"""Turn a pair of orbit-count sequences (a_n, b_n) into a behavior spec.

For n >= N the split uses three channels: the anchor class [G] with (1,1),
the free class [I] with (1,|G|), and the maximal-shortening class with
(nabla, Theta). For n < N the ceiling recipe is exact only when (|G|-1)
divides a_n - b_n; otherwise an exact integer search over the delta=1
channels is used, and genuine infeasibility is reported rather than
approximated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence


from .constructor import BehaviorSpec, build_system, predicted_counts
from .dynsys import perm_period_counts
from .group_core import FiniteGroup, conjugacy_classes_of_subgroups, sigma_table
from .quotient import GrowthReport, build_quotient, growth_estimate, quotient_period_counts


class PreconditionViolation(ValueError):
    pass


class CaseViolation(ValueError):
    pass


class Infeasible(ValueError):
    def __init__(self, n: int, residual: int, detail: str = ""):
        self.n = n
        self.residual = residual
        msg = f"no nonnegative channel combination reproduces index n={n} (residual a_n - b_n = {residual})"
        super().__init__(msg + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class SequencePair:
    """Target counts a_1..a_K and b_1..b_M with K >= M and crossover N.

    ``a`` may run past M so that the upper condition b_n <= a_{nabla n}/Theta
    can be checked; indices where nabla*n > K are only flagged.
    """

    a: tuple[int, ...]
    b: tuple[int, ...]
    N: int
    group: FiniteGroup = field(repr=False)
    flagged: tuple[int, ...] = field(default=(), compare=False)

    @property
    def M(self) -> int:
        return len(self.b)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        object.__setattr__(self, "flagged", tuple(check_pair(self.a, self.b, self.N, self.group)))


def check_pair(a: Sequence[int], b: Sequence[int], N: int, G: FiniteGroup) -> list[int]:
    """Raise PreconditionViolation on the first failed hypothesis; return flagged indices."""
    sig = sigma_table(G)
    nabla, cap, order = sig.nabla, sig.theta_cap, G.order
    M = len(b)
    if M < 1:
        raise PreconditionViolation("need at least one index")
    if len(a) < M:
        raise PreconditionViolation(f"a has {len(a)} entries but b has {M}")
    if N < 1:
        raise PreconditionViolation("crossover N must be >= 1")
    if any(v < 0 for v in a) or any(v < 0 for v in b):
        raise PreconditionViolation("counts must be nonnegative")
    if a[0] < 1:
        raise PreconditionViolation("a_1 must be at least 1")
    if not b[0] > Fraction(a[0], order):
        raise PreconditionViolation(f"b_1 = {b[0]} must exceed a_1/|G| = {Fraction(a[0], order)}")
    flagged = []
    for n in range(1, M + 1):
        an, bn = a[n - 1], b[n - 1]
        if n < N:
            if not Fraction(an, order) <= bn <= an:
                raise PreconditionViolation(f"n={n} < N: need a_n/|G| <= b_n <= a_n, got a_n={an}, b_n={bn}")
        else:
            if bn < an:
                raise PreconditionViolation(f"n={n} >= N: need a_n <= b_n, got a_n={an}, b_n={bn}")
            if nabla * n <= len(a):
                top = Fraction(a[nabla * n - 1], cap)
                if bn > top:
                    raise PreconditionViolation(f"n={n} >= N: need b_n <= a_(nabla n)/Theta = {top}, got {bn}")
                if top < an:
                    raise PreconditionViolation(f"n={n} >= N: need a_(nabla n)/Theta >= a_n, got {top} < {an}")
            else:
                flagged.append(n)
    return flagged


# --- splitting ---------------------------------------------------------------


@dataclass(frozen=True)
class SplitStep:
    n: int
    method: str  # "verbatim", "search" or "recursion"
    entries: dict[tuple[int, int, int], int]


@dataclass(frozen=True)
class SplitResult:
    spec: BehaviorSpec
    steps: tuple[SplitStep, ...]


def glue_channels(G: FiniteGroup) -> list[tuple[int, int]]:
    """One (class id, theta) per distinct theta > 1 among delta=1 channels, largest theta first.

    For each theta the smallest class id is used, so the free class carries
    theta = |G|.
    """
    best: dict[int, int] = {}
    for c, d, t in sigma_table(G).all_channels():
        if d == 1 and t > 1 and t not in best:
            best[t] = c
    return [(best[t], t) for t in sorted(best, reverse=True)]


def _search(residual: int, cap: int, coins: list[tuple[int, int]]) -> Optional[list[int]]:
    """Counts x_i >= 0 with sum x_i*(theta_i - 1) = residual and sum x_i <= cap.

    Depth-first, each coin taken as many times as possible first, so the
    first hit is the lexicographically greatest count vector.
    """
    weights = [t - 1 for _, t in coins]
    g = [0] * (len(weights) + 1)
    for i in range(len(weights) - 1, -1, -1):
        g[i] = math.gcd(g[i + 1], weights[i])
    failed: set[tuple[int, int, int]] = set()

    def go(i: int, r: int, left: int) -> Optional[list[int]]:
        if r == 0:
            return [0] * (len(weights) - i)
        if i == len(weights) or left <= 0 or r % g[i] or (i, r, left) in failed:
            return None
        # the remaining coins are at most weights[i], so need at least r/weights[i] of them
        if -(-r // weights[i]) > left:
            failed.add((i, r, left))
            return None
        for x in range(min(r // weights[i], left), -1, -1):
            rest = go(i + 1, r - x * weights[i], left - x)
            if rest is not None:
                return [x] + rest
        failed.add((i, r, left))
        return None

    return go(0, residual, cap)


def split_with_trace(pair: SequencePair) -> SplitResult:
    G = pair.group
    sig = sigma_table(G)
    order, nabla, cap = G.order, sig.nabla, sig.theta_cap
    top = len(conjugacy_classes_of_subgroups(G)) - 1
    hnab = sig.h_nabla_class
    coins = glue_channels(G)
    free = (0, 1, order)
    anchor = (top, 1, 1)
    shorten = (hnab, nabla, cap)
    a, b, N = pair.a, pair.b, pair.N
    entries: dict[tuple[int, int, int, int], int] = {}
    steps = []
    b_short: dict[int, int] = {}
    for n in range(1, pair.M + 1):
        an, bn = a[n - 1], b[n - 1]
        step: dict[tuple[int, int, int], int] = {}
        if n < N:
            r = an - bn
            if order > 1 and r % (order - 1) == 0:
                method = "verbatim"
                x = r // (order - 1)
                step[free] = x
                step[anchor] = bn - x
            else:
                method = "search"
                limit = bn - 1 if n == 1 else bn
                xs = _search(r, limit, coins) if order > 1 else None
                if xs is None:
                    raise Infeasible(n, r, f"glue weights {[t - 1 for _, t in coins]} with at most {limit} orbits")
                for (c, t), x in zip(coins, xs):
                    if x:
                        step[(c, 1, t)] = x
                step[anchor] = bn - sum(xs)
            b_short[n] = 0
        else:
            method = "recursion"
            prev = b_short.get(n // nabla, 0) if n % nabla == 0 else 0
            g_count = an - cap * prev
            s_count = bn - g_count
            if g_count < 0 or s_count < 0:
                raise Infeasible(n, an - bn, f"recursion gives negative counts ({g_count}, {s_count})")
            step[anchor] = g_count
            step[shorten] = step.get(shorten, 0) + s_count
            b_short[n] = s_count
        for (c, d, t), v in step.items():
            if v:
                entries[(c, d, t, n)] = entries.get((c, d, t, n), 0) + v
        steps.append(SplitStep(n, method, {k: v for k, v in step.items() if v}))
    spec = BehaviorSpec(G, entries)
    pa, pb = predicted_counts(spec, pair.M)
    if pa != a[: pair.M] or pb != b:
        raise AssertionError(f"split does not reproduce the targets: {pa} vs {a[:pair.M]}, {pb} vs {b}")
    return SplitResult(spec, tuple(steps))


def split_sequences(pair: SequencePair) -> BehaviorSpec:
    return split_with_trace(pair).spec


# --- growth-rate instances ----------------------------------------------------


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def corollary12_case(G: FiniteGroup, lam: Fraction, eta: Fraction, c: Fraction) -> str:
    sig = sigma_table(G)
    top = lam ** sig.nabla
    if lam <= 1 or c <= 0:
        raise CaseViolation("need lambda > 1 and c > 0")
    if eta == lam and c >= Fraction(1, G.order):
        return "same-rate"
    if lam < eta < top:
        return "intermediate"
    if eta == top and c <= Fraction(1, sig.theta_cap):
        return "maximal"
    raise CaseViolation(f"(lambda, eta, c) = ({lam}, {eta}, {c}) is outside the three admissible cases")


def corollary12_instance(G: FiniteGroup, lam, eta, c, M: int, max_crossover: int = 10_000) -> SequencePair:
    """a_n = ceil(lambda^n) up to nabla*M, b_n = ceil(c lambda^n) before N and ceil(c eta^n) from N.

    N is the least index with c eta^N < lambda^(nabla N)/Theta; in the
    maximal case equality is allowed, since with c = 1/Theta the strict form
    never holds.
    """
    lam, eta, c = Fraction(lam), Fraction(eta), Fraction(c)
    case = corollary12_case(G, lam, eta, c)
    sig = sigma_table(G)
    nabla, cap = sig.nabla, sig.theta_cap
    N = 1
    while True:
        lhs, rhs = c * eta**N, lam ** (nabla * N) / cap
        if lhs < rhs or (case == "maximal" and lhs <= rhs):
            break
        N += 1
        if N > max_crossover:
            raise CaseViolation(f"no crossover below {max_crossover}")
    a = [_ceil(lam**n) for n in range(1, nabla * M + 1)]
    b = [_ceil(c * (lam if n < N else eta) ** n) for n in range(1, M + 1)]
    return SequencePair(tuple(a), tuple(b), N, G)


# --- end to end ---------------------------------------------------------------


@dataclass
class RealizationReport:
    pair: SequencePair = field(repr=False)
    M: int
    observed_a: tuple[int, ...]
    observed_b: tuple[int, ...]
    points: int
    growth: Optional[GrowthReport] = field(default=None, repr=False)
    steps: tuple[SplitStep, ...] = field(default=(), repr=False)

    @property
    def ok(self) -> bool:
        return self.observed_a == self.pair.a[: self.M] and self.observed_b == self.pair.b[: self.M]

    def mismatches(self) -> list[str]:
        out = []
        for n in range(1, self.M + 1):
            if self.observed_a[n - 1] != self.pair.a[n - 1]:
                out.append(f"n={n}: O_n(T)={self.observed_a[n - 1]}, wanted {self.pair.a[n - 1]}")
            if self.observed_b[n - 1] != self.pair.b[n - 1]:
                out.append(f"n={n}: O_n(T')={self.observed_b[n - 1]}, wanted {self.pair.b[n - 1]}")
        return out


def realize_and_verify(pair: SequencePair, M: Optional[int] = None) -> RealizationReport:
    """Split, build and brute-force count the system; only generator tables are touched."""
    M = pair.M if M is None else M
    if M > pair.M:
        raise PreconditionViolation(f"cannot verify to {M}; pair has {pair.M} indices")
    result = split_with_trace(pair)
    sys = build_system(result.spec)
    up = perm_period_counts(sys.T, M)
    down = quotient_period_counts(build_quotient(sys), M)
    growth = growth_estimate(up, down, sigma_table(pair.group).nabla) if M >= 4 else None
    return RealizationReport(pair, M, up.O, down.O, sys.size, growth, result.steps)


def a4_residual_one_pair() -> SequencePair:
    """A valid A4 pair whose n=2 residual a_2 - b_2 = 1 cannot be absorbed by glueing.

    A4's delta=1 glue weights are theta - 1 in {11, 5, 3, 2}, none of which
    sums to 1.
    """
    from .catalog import catalog_group

    G = catalog_group("A4")
    a = (1, 4) + (4,) * 7
    b = (1, 3, 4)
    return SequencePair(a, b, 3, G)
