"""Hypothesis strategies for equivariant systems.

A twisted suspension over G/H: points (gH, i) with i in Z/m, T moves i one
step and on wrap-around sends gH to g n H for a fixed n in N(H). Left
multiplication commutes with T, so every draw is a valid system, and unions
of several suspensions reach every admissible channel.
"""

from hypothesis import strategies as st

from quotorbits.catalog import SELFTEST_CATALOG, catalog_group
from quotorbits.constructor import BehaviorSpec
from quotorbits.dynsys import disjoint_union, make_system
from quotorbits.group_core import enumerate_subgroups, normalizer, sigma_table


def suspension(G, H, n, m):
    cosets = []
    index = {}
    for g in G:
        c = frozenset(G.mul(g, h) for h in H)
        if c not in index:
            index[c] = len(cosets)
            cosets.append(c)
    rep = [min(c) for c in cosets]
    k = len(cosets)

    def point(ci, i):
        return ci * m + i

    T = [0] * (k * m)
    for ci in range(k):
        for i in range(m):
            if i < m - 1:
                T[point(ci, i)] = point(ci, i + 1)
            else:
                target = frozenset(G.mul(G.mul(rep[ci], n), h) for h in H)
                T[point(ci, i)] = point(index[target], 0)
    action = {}
    for s in G.generators:
        row = [0] * (k * m)
        for ci in range(k):
            target = frozenset(G.mul(s, x) for x in cosets[ci])
            for i in range(m):
                row[point(ci, i)] = point(index[target], i)
        action[s] = row
    return make_system(G, T, action)


@st.composite
def suspensions(draw, names=SELFTEST_CATALOG, max_m=4):
    G = catalog_group(draw(st.sampled_from(names)))
    H = draw(st.sampled_from(enumerate_subgroups(G)))
    n = draw(st.sampled_from(normalizer(G, H).elements))
    m = draw(st.integers(1, max_m))
    return suspension(G, H, n, m)


@st.composite
def equivariant_systems(draw, names=SELFTEST_CATALOG, max_parts=3, max_m=4):
    G = catalog_group(draw(st.sampled_from(names)))
    parts = []
    for _ in range(draw(st.integers(1, max_parts))):
        H = draw(st.sampled_from(enumerate_subgroups(G)))
        n = draw(st.sampled_from(normalizer(G, H).elements))
        parts.append(suspension(G, H, n, draw(st.integers(1, max_m))))
    return disjoint_union(*parts)


@st.composite
def behavior_specs(draw, names=SELFTEST_CATALOG, max_count=3, max_n=4):
    G = catalog_group(draw(st.sampled_from(names)))
    channels = sigma_table(G).all_channels()
    keys = st.tuples(st.sampled_from(channels), st.integers(1, max_n))
    chosen = draw(st.dictionaries(keys, st.integers(1, max_count), max_size=5))
    entries = {(c, d, t, n): v for ((c, d, t), n), v in chosen.items()}
    top = len(sigma_table(G).channels) - 1
    entries[(top, 1, 1, 1)] = entries.get((top, 1, 1, 1), 0) + 1
    return BehaviorSpec(G, entries)
