"""Slow, definition-level reference computations used to cross-check the package.

Nothing here imports the algorithms under test; only plain data is shared.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def subgroups_by_subset_closure(table):
    """Every subset containing the identity that is closed under products (finite => subgroup)."""
    n = len(table)
    e = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    others = [g for g in range(n) if g != e]
    found = []
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            s = set(combo) | {e}
            if all(table[a][b] in s for a in s for b in s):
                found.append(frozenset(s))
    return found


def conjugacy_class_count(table, subgroups):
    n = len(table)
    e = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    inv = [next(h for h in range(n) if table[g][h] == e) for g in range(n)]
    seen, classes = set(), 0
    for H in subgroups:
        if H in seen:
            continue
        classes += 1
        for g in range(n):
            seen.add(frozenset(table[table[g][h]][inv[g]] for h in H))
    return classes


def period_counts_by_iteration(T, N):
    """O_n and F_n by following each point until it returns."""
    k = len(T)
    F = []
    for n in range(1, N + 1):
        count = 0
        for x in range(k):
            y = x
            for _ in range(n):
                y = T[y]
            count += y == x
        F.append(count)
    O = []
    for n in range(1, N + 1):
        exact = F[n - 1] - sum(d * O[d - 1] for d in range(1, n) if n % d == 0)
        O.append(exact // n)
    return O, F


def action_is_homomorphism(table, full_action):
    """Literal check over all pairs: act(g*h) == act(g) o act(h)."""
    n = len(table)
    for g in range(n):
        for h in range(n):
            gh = full_action[table[g][h]]
            comp = [full_action[g][full_action[h][x]] for x in range(len(gh))]
            if list(gh) != comp:
                return False
    return True


def quotient_by_definition(T, full_action):
    """G-orbits as frozensets and the induced map on them."""
    k = len(T)
    orbit_of = {}
    for x in range(k):
        if x not in orbit_of:
            orb = frozenset(row[x] for row in full_action)
            for y in orb:
                orbit_of[y] = orb
    classes = sorted(set(orbit_of.values()), key=min)
    index = {c: i for i, c in enumerate(classes)}
    Tq = []
    for c in classes:
        images = {index[orbit_of[T[x]]] for x in c}
        assert len(images) == 1
        Tq.append(images.pop())
    return classes, Tq


def orbit_behaviour_by_definition(T, full_action, x):
    """(length, delta, theta, stabilizer) of the T-orbit of x straight from the definitions."""
    orbit_T = [x]
    y = T[x]
    while y != x:
        orbit_T.append(y)
        y = T[y]
    orbit_G = {row[x] for row in full_action}
    delta = len(set(orbit_T) & orbit_G)
    theta = Fraction(len(orbit_G), delta)
    stab = frozenset(g for g, row in enumerate(full_action) if row[x] == x)
    return len(orbit_T), delta, theta, stab


def snf_diagonal(M):
    """Smith normal form diagonal from determinantal divisors (2x2 only)."""
    from math import gcd

    (a, b), (c, d) = M
    d1 = gcd(gcd(abs(a), abs(b)), gcd(abs(c), abs(d)))
    det = abs(a * d - b * c)
    return [d1, det // d1 if d1 else 0]
