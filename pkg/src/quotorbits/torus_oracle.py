"""The doubling map on the 2-torus with the square's symmetry group D8.

Periodic points of doubling have odd denominators. A point of period
dividing L has coordinates in (1/(2^L - 1))Z, so layer L is the finite
grid (Z/(2^L - 1))^2 with T(i, j) = (2i, 2j). Quotient counts are computed
by solving (2^n I - A_g) v = 0 mod 1 for every symmetry g with a Smith
normal form, which avoids enumerating the much larger layer 4n.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .catalog import catalog_group
from .dynsys import FiniteDynSystem, cycle_labels, make_system, period_counts, stabilizer_classes
from .group_core import FiniteGroup, conjugacy_classes_of_subgroups
from .quotient import BehaviorCensus, behavior_census, build_quotient


class HorizonGuard(ValueError):
    pass


class SingularCongruence(ValueError):
    pass


class OutsideFundamentalDomain(ValueError):
    pass


def _guard(name: str, default: int) -> int:
    return int(os.environ.get(f"QUOTORBITS_{name}", default))


def _check(n: int, name: str, default: int) -> None:
    limit = _guard(name, default)
    if not 1 <= n <= limit:
        raise HorizonGuard(f"n={n} outside 1..{limit} (override with QUOTORBITS_{name})")


def d8() -> FiniteGroup:
    return catalog_group("D8")


# --- exact points and symmetries ----------------------------------------------


@dataclass(frozen=True, order=True)
class RationalTorusPoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        x, y = Fraction(self.x) % 1, Fraction(self.y) % 1
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def periodic(self) -> bool:
        return self.x.denominator % 2 == 1 and self.y.denominator % 2 == 1

    def double(self) -> "RationalTorusPoint":
        return RationalTorusPoint(2 * self.x, 2 * self.y)

    def in_domain(self) -> bool:
        return 0 <= self.y <= self.x <= Fraction(1, 2)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


@dataclass(frozen=True)
class AffineSymmetry:
    """v -> A v + c mod 1."""

    A: tuple[tuple[int, int], tuple[int, int]]
    c: tuple[Fraction, Fraction]
    label: str

    def __post_init__(self):
        object.__setattr__(self, "c", (Fraction(self.c[0]) % 1, Fraction(self.c[1]) % 1))

    def __call__(self, p: RationalTorusPoint) -> RationalTorusPoint:
        (a, b), (cc, d) = self.A
        return RationalTorusPoint(a * p.x + b * p.y + self.c[0], cc * p.x + d * p.y + self.c[1])

    def compose(self, other: "AffineSymmetry", label: str) -> "AffineSymmetry":
        """self after other."""
        (a, b), (c, d) = self.A
        (e, f), (g, h) = other.A
        A = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        shift = (
            (a * other.c[0] + b * other.c[1] + self.c[0]) % 1,
            (c * other.c[0] + d * other.c[1] + self.c[1]) % 1,
        )
        return AffineSymmetry(A, shift, label)

    def same_map(self, other: "AffineSymmetry") -> bool:
        return self.A == other.A and self.c == other.c

    def int_action(self, i: np.ndarray, j: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
        """Action on integer coordinates mod m; the shift must be 0 mod 1."""
        if any(s != 0 for s in self.c):
            raise ValueError("integer action needs an integral shift")
        (a, b), (c, d) = self.A
        return (a * i + b * j) % m, (c * i + d * j) % m


# (x, y) -> (1 - y, x), a quarter turn, and (x, y) -> (y, x)
ROTATION = AffineSymmetry(((0, -1), (1, 0)), (Fraction(1), Fraction(0)), "a")
REFLECTION = AffineSymmetry(((0, 1), (1, 0)), (Fraction(0), Fraction(0)), "t")


def d8_symmetries() -> dict[int, AffineSymmetry]:
    """The eight symmetries keyed by element index of the catalog D8.

    Element g with word w1*w2*...*wk is the composite of the generator maps
    in the same order, matching the catalog's product convention.
    """
    return dict(_symmetries())


@functools.lru_cache(maxsize=None)
def _symmetries() -> tuple[tuple[int, AffineSymmetry], ...]:
    G = d8()
    gens = {G.element("a"): ROTATION, G.element("t"): REFLECTION}
    out = {G.identity: AffineSymmetry(((1, 0), (0, 1)), (Fraction(0), Fraction(0)), G.labels[G.identity])}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s, sym in gens.items():
                h = G.mul(s, g)
                if h not in out:
                    out[h] = sym.compose(out[g], G.labels[h])
                    nxt.append(h)
        frontier = nxt
    return tuple(sorted(out.items()))


def canonical_representative(p: RationalTorusPoint) -> RationalTorusPoint:
    """Lexicographically smallest member of the D8-orbit lying in 0 <= y <= x <= 1/2."""
    cands = [s(p) for _, s in _symmetries()]
    inside = [q for q in cands if q.in_domain()]
    return min(inside, key=lambda q: (q.x, q.y))


def fold(p: RationalTorusPoint) -> RationalTorusPoint:
    """Closed-form orbit invariant: reflect each coordinate into [0,1/2], then sort."""
    x, y = min(p.x, 1 - p.x), min(p.y, 1 - p.y)
    return RationalTorusPoint(max(x, y), min(x, y))


def stabilizer_labels(p: RationalTorusPoint) -> tuple[str, ...]:
    G = d8()
    return tuple(G.labels[g] for g, s in d8_symmetries().items() if s(p) == p)


def stabilizer_class_of_point(p: RationalTorusPoint) -> int:
    G = d8()
    els = [g for g, s in d8_symmetries().items() if s(p) == p]
    return conjugacy_classes_of_subgroups(G).class_of_elements(els)


def named_classes() -> dict[str, int]:
    """Class ids of the five stabilizer classes occurring on the torus."""
    G = d8()
    t = conjugacy_classes_of_subgroups(G)
    return {
        "G": t.class_of_elements(list(G)),
        "Omega": t.class_of_elements([G.element(w) for w in ("e", "a*a", "t*a", "a*t")]),
        "Phi": t.class_of_elements([G.element(w) for w in ("e", "t*a")]),
        "Pi": t.class_of_elements([G.element(w) for w in ("e", "t")]),
        "I": t.class_of_elements([G.identity]),
    }


# --- the triangle map ----------------------------------------------------------

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def _triangle_branches(x: Fraction, y: Fraction) -> list[tuple[int, tuple[Fraction, Fraction]]]:
    out = []
    if 0 <= y <= x <= QUARTER:
        out.append((1, (2 * x, 2 * y)))
    if QUARTER <= x <= HALF and 0 <= y <= QUARTER and y <= HALF - x:
        out.append((2, (1 - 2 * x, 2 * y)))
    if QUARTER <= x <= HALF and 0 <= y <= QUARTER and y >= HALF - x:
        out.append((3, (2 * y, 1 - 2 * x)))
    if QUARTER <= y <= x <= HALF:
        out.append((4, (1 - 2 * y, 1 - 2 * x)))
    return out


def triangle_map(p: RationalTorusPoint) -> RationalTorusPoint:
    """Induced map on the fundamental triangle 0 <= y <= x <= 1/2.

    The first branch applies only for x <= 1/4; beyond that 2x leaves the
    triangle. Where branches overlap they must agree.
    """
    if not p.in_domain():
        raise OutsideFundamentalDomain(str(p))
    branches = _triangle_branches(p.x, p.y)
    values = {v for _, v in branches}
    if len(values) != 1:
        raise AssertionError(f"triangle map branches disagree at {p}: {branches}")
    x, y = values.pop()
    return RationalTorusPoint(x, y)


def triangle_branch_ids(p: RationalTorusPoint) -> tuple[int, ...]:
    return tuple(i for i, _ in _triangle_branches(p.x, p.y))


# --- finite layers ------------------------------------------------------------


def layer_points(n: int) -> list[RationalTorusPoint]:
    m = 2**n - 1
    return [RationalTorusPoint(Fraction(i, m), Fraction(j, m)) for i in range(m) for j in range(m)]


def _system_on_grid(i: np.ndarray, j: np.ndarray, m: int) -> FiniteDynSystem:
    """System on the given (sorted, T- and D8-closed) integer points mod m."""
    G = d8()
    keys = i.astype(np.int64) * m + j
    order = np.argsort(keys, kind="stable")
    i, j, keys = i[order], j[order], keys[order]

    def index(ii, jj):
        k = ii.astype(np.int64) * m + jj
        pos = np.searchsorted(keys, k)
        if np.any(pos >= len(keys)) or np.any(keys[np.minimum(pos, len(keys) - 1)] != k):
            raise AssertionError("point set is not closed under the maps")
        return pos

    syms = d8_symmetries()
    T = index((2 * i) % m, (2 * j) % m)
    action = {}
    for label in ("a", "t"):
        g = G.element(label)
        action[g] = index(*syms[g].int_action(i, j, m))
    return make_system(G, T, action, point_labels=_GridLabels(i, j, m))


@dataclass(frozen=True, eq=False)
class _GridLabels:
    i: np.ndarray = field(repr=False)
    j: np.ndarray = field(repr=False)
    m: int

    def __len__(self) -> int:
        return len(self.i)

    def __getitem__(self, k: int) -> RationalTorusPoint:
        return RationalTorusPoint(Fraction(int(self.i[k]), self.m), Fraction(int(self.j[k]), self.m))


def layer_system(n: int) -> FiniteDynSystem:
    """All points of period dividing n: the grid (Z/(2^n-1))^2."""
    _check(n, "TORUS_LAYER_MAX", 10)
    m = 2**n - 1
    i, j = np.divmod(np.arange(m * m, dtype=np.int64), m)
    return _system_on_grid(i, j, m)


# --- Smith normal form and congruences ----------------------------------------


def smith_normal_form(M) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """(U, D, V) with U M V = D diagonal, d_i | d_{i+1}, U and V unimodular."""
    A = [list(map(int, r)) for r in M]
    rows, cols = len(A), len(A[0])
    U = [[int(r == c) for c in range(rows)] for r in range(rows)]
    V = [[int(r == c) for c in range(cols)] for r in range(cols)]

    def swap_rows(X, a, b):
        X[a], X[b] = X[b], X[a]

    def swap_cols(X, a, b):
        for r in X:
            r[a], r[b] = r[b], r[a]

    def add_row(X, dst, src, k):  # row dst += k * row src
        X[dst] = [x + k * y for x, y in zip(X[dst], X[src])]

    def add_col(X, dst, src, k):
        for r in X:
            r[dst] += k * r[src]

    for t in range(min(rows, cols)):
        while True:
            nz = [(abs(A[r][c]), r, c) for r in range(t, rows) for c in range(t, cols) if A[r][c]]
            if not nz:
                return U, A, V
            _, r, c = min(nz)
            swap_rows(A, t, r), swap_rows(U, t, r)
            swap_cols(A, t, c), swap_cols(V, t, c)
            p = A[t][t]
            done = True
            for r in range(t + 1, rows):
                q = A[r][t] // p
                add_row(A, r, t, -q), add_row(U, r, t, -q)
                done &= A[r][t] == 0
            for c in range(t + 1, cols):
                q = A[t][c] // p
                add_col(A, c, t, -q), add_col(V, c, t, -q)
                done &= A[t][c] == 0
            if not done:
                continue
            bad = [(r, c) for r in range(t + 1, rows) for c in range(t + 1, cols) if A[r][c] % p]
            if not bad:
                break
            add_row(A, t, bad[0][0], 1), add_row(U, t, bad[0][0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def solve_congruence(M, modulus: int) -> tuple[np.ndarray, np.ndarray]:
    """All v in ((1/modulus)Z/Z)^2 with M v = 0 mod 1, as integer coordinates mod ``modulus``.

    The solutions are V (k1/d1, k2/d2) for 0 <= k_i < d_i. Every d_i must
    divide ``modulus``. A singular M has infinitely many solutions on the
    torus and is refused.
    """
    U, D, V = smith_normal_form(M)
    d = [D[0][0], D[1][1]]
    if 0 in d:
        raise SingularCongruence(f"matrix {M} is singular; its solution set is not finite")
    for di in d:
        if modulus % di:
            raise ValueError(f"solutions have denominator {di}, which does not divide {modulus}")
    k1, k2 = np.meshgrid(np.arange(d[0], dtype=np.int64), np.arange(d[1], dtype=np.int64), indexing="ij")
    k1, k2 = k1.ravel(), k2.ravel()
    s = [modulus // d[0], modulus // d[1]]
    coef = [[(V[r][c] * s[c]) % modulus for c in range(2)] for r in range(2)]
    i = (coef[0][0] * k1 % modulus + coef[0][1] * k2 % modulus) % modulus
    j = (coef[1][0] * k1 % modulus + coef[1][1] * k2 % modulus) % modulus
    return i, j


def twisted_fixed_set(g: int, n: int, modulus: int) -> tuple[np.ndarray, np.ndarray]:
    """Points v with T^n v = g(v), i.e. (2^n I - A_g) v = 0 mod 1."""
    A = d8_symmetries()[g].A
    M = [[2**n * (r == c) - A[r][c] for c in range(2)] for r in range(2)]
    return solve_congruence(M, modulus)


def quotient_periodic_grid(n: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Union over g of the twisted fixed sets: every point whose image has period dividing n.

    All of them have period dividing 4n, so they live on the grid mod 2^(4n)-1.
    """
    m4 = 2 ** (4 * n) - 1
    parts = [twisted_fixed_set(g, n, m4) for g in d8()]
    i = np.concatenate([p[0] for p in parts])
    j = np.concatenate([p[1] for p in parts])
    key = np.unique(i.astype(np.uint64) * np.uint64(m4) + j.astype(np.uint64))
    i, j = np.divmod(key, np.uint64(m4))
    return i.astype(np.int64), j.astype(np.int64), m4


def _fold_keys(i: np.ndarray, j: np.ndarray, m: int) -> np.ndarray:
    x, y = np.minimum(i, m - i) % m, np.minimum(j, m - j) % m
    hi, lo = np.maximum(x, y), np.minimum(x, y)
    return hi.astype(np.uint64) * np.uint64(m) + lo.astype(np.uint64)


def quotient_fixed_count(n: int) -> int:
    """Number of points of the quotient with period dividing n."""
    _check(n, "TORUS_QUOTIENT_MAX", 8)
    i, j, m4 = quotient_periodic_grid(n)
    return int(len(np.unique(_fold_keys(i, j, m4))))


def quotient_fixed_count_by_layer(n: int) -> int:
    """Same count from the full quotient of layer 4n (feasible for n <= 2)."""
    sys = layer_system(4 * n)
    q = build_quotient(sys)
    _, lengths = cycle_labels(q.Tprime)
    return int(np.count_nonzero(n % lengths == 0))


def twisted_fixed_sizes(n: int) -> dict[str, tuple[int, int]]:
    """Per symmetry: (number of solutions found, |det(2^n I - A)|)."""
    m4 = 2 ** (4 * n) - 1
    out = {}
    for g, s in d8_symmetries().items():
        (a, b), (c, d) = s.A
        det = (2**n - a) * (2**n - d) - b * c
        out[s.label] = (len(twisted_fixed_set(g, n, m4)[0]), abs(det))
    return out


# --- semi-conjugacy -----------------------------------------------------------


@dataclass
class SemiconjugacyReport:
    n: int
    points: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_semiconjugacy(n: int) -> SemiconjugacyReport:
    """canonical(T v) == triangle_map(canonical(v)) for every point of layer n."""
    _check(n, "TORUS_QUOTIENT_MAX", 8)
    failures = []
    pts = layer_points(n)
    for p in pts:
        lhs = canonical_representative(p.double())
        rhs = triangle_map(canonical_representative(p))
        if lhs != rhs:
            failures.append(f"{p}: canonical(T p) = {lhs} but triangle(canonical p) = {rhs}")
            if len(failures) >= 20:
                break
    return SemiconjugacyReport(n, len(pts), failures)


# --- the four-line census ------------------------------------------------------

# the channels that occur, per named class: (delta, theta)
DISPLAYED_CHANNELS = {
    "G": ((1, 1),),
    "Phi": ((1, 4), (2, 2)),
    "Pi": ((1, 4), (2, 2)),
    "I": ((1, 8), (2, 4), (4, 2)),
}


@dataclass
class TorusCensus:
    n: int
    points: int
    direct: dict[str, int]
    predicted: dict[str, Fraction]
    channel_counts: dict[tuple[str, int, int], int]
    stray_channels: list[str]
    omega_points: int
    quotient_fixed: int
    census: Optional[BehaviorCensus] = field(default=None, repr=False)

    @property
    def identities_hold(self) -> bool:
        return all(self.direct.get(k, 0) == self.predicted[k] for k in self.predicted)

    @property
    def ok(self) -> bool:
        return self.identities_hold and not self.stray_channels and self.omega_points == 0


def quotient_periodic_system(n: int) -> FiniteDynSystem:
    """The finite system on every point whose quotient image has period dividing n."""
    i, j, m4 = quotient_periodic_grid(n)
    return _system_on_grid(i, j, m4)


def eq9_census(n: int, sys: Optional[FiniteDynSystem] = None) -> TorusCensus:
    """Orbits whose image has length exactly n, grouped by stabilizer class and channel.

    Compares the quotient orbit count of each class, counted directly, with
    the channel sum over upstairs orbits of length delta*n divided by theta.
    """
    _check(n, "TORUS_CENSUS_MAX", 6)
    sys = sys if sys is not None else quotient_periodic_system(n)
    names = named_classes()
    by_id = {v: k for k, v in names.items()}
    census = behavior_census(sys, n)
    q = build_quotient(sys)
    _, qlen = cycle_labels(q.Tprime)
    cls = stabilizer_classes(sys)
    omega = int(np.count_nonzero(cls == names["Omega"]))
    direct: dict[str, int] = {k: 0 for k in DISPLAYED_CHANNELS}
    rep_cls = cls[q.representatives]
    # each quotient orbit of length n contributes n quotient points
    for c in np.unique(rep_cls[qlen == n]).tolist():
        key = by_id.get(c, f"class {c}")
        direct[key] = direct.get(key, 0) + int(np.count_nonzero((qlen == n) & (rep_cls == c))) // n
    channel_counts: dict[tuple[str, int, int], int] = {}
    stray = []
    for (c, d, t, L), v in census.counts.items():
        if L != d * n:
            continue
        name = by_id.get(c, f"class {c}")
        channel_counts[(name, d, t)] = channel_counts.get((name, d, t), 0) + v
        if (d, t) not in DISPLAYED_CHANNELS.get(name, ()):
            stray.append(f"{name} ({d},{t}) at upstairs length {L}: {v} orbits")
    predicted = {
        name: sum((Fraction(channel_counts.get((name, d, t), 0), t) for d, t in chans), Fraction(0))
        for name, chans in DISPLAYED_CHANNELS.items()
    }
    fixed = int(np.count_nonzero(n % qlen == 0))
    return TorusCensus(n, sys.size, direct, predicted, channel_counts, stray, omega, fixed, census)


def shortening_fractions(max_n: int) -> list[Fraction]:
    """For each n: among T-orbits of length at most n, the fraction whose image is shorter."""
    _check(max_n, "TORUS_CENSUS_MAX", 6)
    out = []
    short = total = 0
    for k in range(1, max_n + 1):
        census = behavior_census(quotient_periodic_system(k), k)
        for (c, d, t, L), v in census.counts.items():
            if L == k:
                total += v
                short += v if d > 1 else 0
        out.append(Fraction(short, total))
    return out


# --- tabulated counts ----------------------------------------------------------


def fcounts_rows(max_n: int, quotient_max: int = 8) -> list[tuple]:
    """Rows n, F_n(T), (2^n-1)^2, F_n(quotient), 4^n, match flags; quotient blank past its guard."""
    rows = []
    for n in range(1, max_n + 1):
        F = period_counts(layer_system(n), n).F[n - 1]
        expect = (2**n - 1) ** 2
        if n <= quotient_max:
            Fq = quotient_fixed_count(n)
            rows.append((n, F, expect, Fq, 4**n, F == expect, Fq == 4**n))
        else:
            rows.append((n, F, expect, None, 4**n, F == expect, None))
    return rows


FCOUNT_HEADER = ("n", "F_n(T)", "(2^n-1)^2", "F_n(T_hat)", "4^n", "F_match", "F_hat_match")
