"""Finite dynamical systems (X, T) carrying a commuting group action.

Point sets are ``0..k-1``; ``T`` and the action are integer arrays so that
systems with millions of points stay tractable. The action is stored for a
chosen set of group elements (usually generators) and completed to all of
G on demand.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .group_core import (
    ConjClassTable,
    FiniteGroup,
    Subgroup,
    conjugacy_classes_of_subgroups,
    subgroup_from_mask,
)

MAX_WITNESSES = 20


class DynSystemError(ValueError):
    pass


class ActionIncomplete(DynSystemError):
    pass


class StabilizerNotTInvariant(DynSystemError):
    def __init__(self, x: int):
        self.witness = x
        super().__init__(f"stabilizer of point {x} differs from that of T({x}); point is not periodic")


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteDynSystem:
    group: FiniteGroup
    T: np.ndarray
    action_elements: tuple[int, ...]
    action_tables: np.ndarray
    point_labels: Optional[Sequence] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.T)

    @functools.cached_property
    def full_action(self) -> np.ndarray:
        """Array of shape (|G|, k): row g is the permutation induced by g."""
        table, problems = _complete_action(self)
        if problems:
            raise ActionIncomplete(problems[0])
        table.setflags(write=False)
        return table

    def act(self, g: int, x: int) -> int:
        return int(self.full_action[g, x])


def make_system(
    group: FiniteGroup,
    T: Sequence[int],
    action: Optional[Mapping[int, Sequence[int]]] = None,
    point_labels: Optional[Sequence] = None,
) -> FiniteDynSystem:
    """Build a system; ``action`` maps element indices to point permutations.

    With ``action=None`` every element acts trivially.
    """
    T = _readonly(T)
    if action is None:
        action = {g: np.arange(len(T)) for g in group.generators or (group.identity,)}
    elements = tuple(sorted(action))
    tables = _readonly([np.asarray(action[g]) for g in elements]).reshape(len(elements), len(T))
    return FiniteDynSystem(group, T, elements, tables, point_labels)


def disjoint_union(*systems: FiniteDynSystem) -> FiniteDynSystem:
    """Union of systems over one group; later systems' points are shifted."""
    G = systems[0].group
    elements = tuple(sorted(set().union(*(s.action_elements for s in systems))))
    Ts, rows, offset = [], {g: [] for g in elements}, 0
    for s in systems:
        if s.group is not G:
            raise DynSystemError("disjoint union needs a common group object")
        Ts.append(s.T + offset)
        for g in elements:
            rows[g].append(s.full_action[g] + offset)
        offset += s.size
    T = np.concatenate(Ts)
    return make_system(G, T, {g: np.concatenate(rows[g]) for g in elements})


# --- validation ------------------------------------------------------------


def _is_permutation(p: np.ndarray) -> bool:
    return bool(len(p) == 0 or (p.min() >= 0 and p.max() < len(p) and len(np.unique(p)) == len(p)))


def _complete_action(sys: FiniteDynSystem) -> tuple[np.ndarray, list[str]]:
    """Extend the stored tables to all of G along words in the stored elements.

    Checking act(s*g) == act(s) o act(g) for each stored s and every g is
    equivalent to the homomorphism property on all pairs, given that the
    stored elements generate G.
    """
    G, k = sys.group, sys.size
    problems: list[str] = []
    full = np.empty((G.order, k), dtype=np.int64)
    known = [False] * G.order
    full[G.identity] = np.arange(k)
    known[G.identity] = True
    for g, row in zip(sys.action_elements, sys.action_tables):
        if g == G.identity and not np.array_equal(row, np.arange(k)):
            x = int(np.flatnonzero(row != np.arange(k))[0])
            problems.append(f"identity moves point {x}")
    queue = deque([G.identity])
    while queue:
        g = queue.popleft()
        for s, row in zip(sys.action_elements, sys.action_tables):
            h = G.table[s][g]
            cand = row[full[g]]
            if not known[h]:
                full[h] = cand
                known[h] = True
                queue.append(h)
            elif not np.array_equal(full[h], cand):
                x = int(np.flatnonzero(full[h] != cand)[0])
                problems.append(
                    f"action not a homomorphism: act({G.labels[s]}*{G.labels[g]}, {x}) = {int(full[h, x])}"
                    f" but act({G.labels[s]}, act({G.labels[g]}, {x})) = {int(cand[x])}"
                )
    missing = [g for g in G if not known[g]]
    if missing:
        problems.append(
            f"listed action elements do not generate G (e.g. {G.labels[missing[0]]} is unreachable)"
        )
    return full, problems


@dataclass
class ValidationReport:
    ok: bool
    t_bijective: bool
    action_problems: list[str]
    commutation_witnesses: list[tuple[int, int]]
    commutation_violations: int

    def messages(self) -> list[str]:
        out = []
        if not self.t_bijective:
            out.append("T is not a bijection")
        out.extend(self.action_problems)
        for g, x in self.commutation_witnesses:
            out.append(f"action does not commute with T at element {g}, point {x}")
        return out


def validate_system(sys: FiniteDynSystem) -> ValidationReport:
    t_ok = _is_permutation(np.asarray(sys.T))
    action_problems = [
        f"element {g} does not act bijectively"
        for g, row in zip(sys.action_elements, sys.action_tables)
        if not _is_permutation(row)
    ]
    witnesses: list[tuple[int, int]] = []
    violations = 0
    if not action_problems:
        full, problems = _complete_action(sys)
        action_problems.extend(problems[:MAX_WITNESSES])
        if t_ok and not problems:
            # commutation on the stored elements implies it for all of G
            for g in sys.action_elements:
                bad = np.flatnonzero(full[g][sys.T] != sys.T[full[g]])
                violations += len(bad)
                witnesses.extend((g, int(x)) for x in bad[: MAX_WITNESSES - len(witnesses)])
    ok = t_ok and not action_problems and violations == 0
    return ValidationReport(ok, t_ok, action_problems, witnesses, violations)


# --- orbits and periods ----------------------------------------------------


def cycle_labels(perm: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each point: the smallest point of its cycle, and the cycle length."""
    perm = np.asarray(perm)
    label = np.arange(len(perm))
    p = perm.copy()
    while True:
        new = np.minimum(label, label[p])
        if np.array_equal(new, label):
            break
        label = new
        p = p[p]
    lengths = np.bincount(label, minlength=len(perm))[label]
    return label, lengths


def group_orbit_labels(tables: np.ndarray) -> np.ndarray:
    """Smallest point of each point's orbit under the permutations in ``tables``."""
    k = tables.shape[1]
    label = np.arange(k)
    while True:
        new = label
        for row in tables:
            new = np.minimum(new, new[row])
        if np.array_equal(new, label):
            return label
        label = new


@dataclass(frozen=True)
class OrbitRecord:
    points: tuple[int, ...]
    length: int
    representative: int


def orbits(sys: FiniteDynSystem) -> list[OrbitRecord]:
    label, lengths = cycle_labels(sys.T)
    reps = np.flatnonzero(label == np.arange(sys.size))
    T = sys.T.tolist()
    out = []
    for r in reps.tolist():
        pts = [r]
        x = T[r]
        while x != r:
            pts.append(x)
            x = T[x]
        out.append(OrbitRecord(tuple(pts), len(pts), r))
    return out


@dataclass(frozen=True)
class PeriodCounts:
    """Index i holds the value for n = i + 1."""

    horizon: int
    O: tuple[int, ...]
    F: tuple[int, ...]
    pi: tuple[int, ...]

    def orbits_of_length(self, n: int) -> int:
        return self.O[n - 1]

    def points_of_period(self, n: int) -> int:
        return self.F[n - 1]


def counts_from_lengths(cycle_lengths: Sequence[int], N: int) -> PeriodCounts:
    """Period counts from the multiset of all cycle lengths of a permutation."""
    lengths = np.asarray(cycle_lengths, dtype=np.int64)
    all_O = np.bincount(lengths, minlength=N + 1)
    O = [int(all_O[n]) for n in range(1, N + 1)]
    F = [sum(d * int(all_O[d]) for d in range(1, n + 1) if n % d == 0 and d < len(all_O)) for n in range(1, N + 1)]
    pi = list(np.cumsum(O).tolist()) if O else []
    return PeriodCounts(N, tuple(O), tuple(F), tuple(int(v) for v in pi))


def perm_period_counts(perm: np.ndarray, N: int) -> PeriodCounts:
    label, lengths = cycle_labels(perm)
    reps = label == np.arange(len(perm))
    return counts_from_lengths(lengths[reps], N)


def period_counts(sys: FiniteDynSystem, N: int) -> PeriodCounts:
    if N < 1:
        raise ValueError("horizon must be >= 1")
    return perm_period_counts(sys.T, N)


# --- stabilizers and the periodic-set partition ----------------------------


def stabilizer_masks(sys: FiniteDynSystem) -> np.ndarray:
    """Bitmask over element indices of each point's stabilizer."""
    full = sys.full_action
    pts = np.arange(sys.size)
    masks = np.zeros(sys.size, dtype=np.int64)
    for g in range(sys.group.order):
        masks |= (full[g] == pts).astype(np.int64) << g
    return masks


def stabilizer(sys: FiniteDynSystem, x: int) -> Subgroup:
    els = tuple(g for g in sys.group if sys.full_action[g, x] == x)
    return Subgroup(els, sys.group)


def stabilizer_classes(sys: FiniteDynSystem, classes: Optional[ConjClassTable] = None) -> np.ndarray:
    """Conjugacy-class id of each point's stabilizer."""
    classes = classes or conjugacy_classes_of_subgroups(sys.group)
    masks = stabilizer_masks(sys)
    uniq, inverse = np.unique(masks, return_inverse=True)
    ids = np.array([classes.class_of_mask(int(m)) for m in uniq], dtype=np.int64)
    return ids[inverse.reshape(-1)]


def partition_by_class(sys: FiniteDynSystem) -> dict[int, np.ndarray]:
    masks = stabilizer_masks(sys)
    bad = np.flatnonzero(masks != masks[sys.T])
    if len(bad):
        raise StabilizerNotTInvariant(int(bad[0]))
    classes = conjugacy_classes_of_subgroups(sys.group)
    cls = stabilizer_classes(sys, classes)
    return {int(c): np.flatnonzero(cls == c) for c in np.unique(cls)}


def stabilizer_subgroup(sys: FiniteDynSystem, mask: int) -> Subgroup:
    return subgroup_from_mask(sys.group, mask)
