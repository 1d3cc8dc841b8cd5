"""Build a finite system whose orbit behaviour matches a prescribed table.

A behavior spec assigns to each channel (class [H], delta, theta) and each
downstairs length n a count b. Each nonzero count becomes a block
``S x {1..b} x Z/(delta*n)`` where T advances the last coordinate and g acts
through the decomposition ``g s = s' h^l h'``. Here ``h`` normalizes H with
coset order delta, ``K = <h>H`` and S is a transversal of G/K, so |S| = theta.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynsys import FiniteDynSystem, make_system, period_counts, validate_system
from .group_core import (
    FiniteGroup,
    Subgroup,
    conjugacy_classes_of_subgroups,
    coset_order,
    generated_subgroup,
    normalizer,
    sigma_table,
)
from .quotient import BehaviorCensus, behavior_census, build_quotient, quotient_period_counts


class SpecChannelInvalid(ValueError):
    pass


class DecompositionFailed(AssertionError):
    pass


ChannelKey = tuple[int, int, int, int]  # (class id, delta, theta, downstairs n)


@dataclass(frozen=True)
class BehaviorSpec:
    group: FiniteGroup = field(repr=False)
    entries: dict[ChannelKey, int]
    allow_no_anchor: bool = False

    def __post_init__(self):
        sigma = sigma_table(self.group)
        top = len(conjugacy_classes_of_subgroups(self.group)) - 1
        clean = {}
        for key, b in self.entries.items():
            c, d, t, n = key
            if c not in sigma.channels or (d, t) not in sigma[c]:
                raise SpecChannelInvalid(f"({d},{t}) is not an admissible channel of class {c}")
            if n < 1:
                raise SpecChannelInvalid(f"lengths start at 1, got {n}")
            if b < 0:
                raise SpecChannelInvalid(f"negative count {b} at {key}")
            if b:
                clean[key] = int(b)
        object.__setattr__(self, "entries", dict(sorted(clean.items())))
        if not self.allow_no_anchor and self.entries.get((top, 1, 1, 1), 0) < 1:
            raise SpecChannelInvalid("need at least one fixed point with full stabilizer (anchor)")

    @property
    def anchor_class(self) -> int:
        return len(conjugacy_classes_of_subgroups(self.group)) - 1

    @property
    def horizon(self) -> int:
        """Largest upstairs length needed: max n over entries times the largest element order."""
        if not self.entries:
            return 0
        return max(n for (_, _, _, n) in self.entries) * sigma_table(self.group).nabla


# --- channel geometry ------------------------------------------------------


@dataclass(frozen=True)
class ChannelGeometry:
    class_id: int
    delta: int
    theta: int
    H: Subgroup = field(repr=False)
    h_sigma: int
    K: Subgroup = field(repr=False)
    transversal: tuple[int, ...]
    # for each g: (index in transversal of the coset gK, exponent l with s'^-1 g in h^l H)
    _coset_rep: tuple[int, ...] = field(repr=False)
    _exponent: dict[int, int] = field(repr=False)


def select_channel_geometry(G: FiniteGroup, class_id: int, sigma: tuple[int, int]) -> ChannelGeometry:
    delta, theta = sigma
    if (delta, theta) not in sigma_table(G)[class_id]:
        raise SpecChannelInvalid(f"({delta},{theta}) is not admissible for class {class_id}")
    H = conjugacy_classes_of_subgroups(G)[class_id].representative
    h = next(g for g in normalizer(G, H) if coset_order(G, H, g) == delta)
    K = generated_subgroup(G, tuple(H) + (h,))
    exponent = {}
    hl = G.identity
    for l in range(delta):
        for x in H:
            exponent[G.mul(hl, x)] = l
        hl = G.mul(h, hl)
    transversal: list[int] = []
    coset_rep = [-1] * G.order
    for g in G:
        if coset_rep[g] < 0:
            for k in K:
                coset_rep[G.mul(g, k)] = len(transversal)
            transversal.append(g)
    geom = ChannelGeometry(class_id, delta, theta, H, h, K, tuple(transversal), tuple(coset_rep), exponent)
    if len(K) != delta * len(H) or len(transversal) != theta:
        raise DecompositionFailed(f"geometry for class {class_id}, ({delta},{theta}) has wrong sizes")
    return geom


def decompose(G: FiniteGroup, geom: ChannelGeometry, g: int, s: int) -> tuple[int, int]:
    """Write g*s = s' h^l h' with s' in the transversal, 0 <= l < delta, h' in H."""
    gs = G.mul(g, s)
    s_new = geom.transversal[geom._coset_rep[gs]]
    l = geom._exponent.get(G.mul(G.inv(s_new), gs))
    if l is None:
        raise DecompositionFailed(f"{G.labels[g]}*{G.labels[s]} has no decomposition")
    return s_new, l


# --- construction ----------------------------------------------------------


@dataclass(frozen=True)
class Block:
    key: ChannelKey
    offset: int
    count: int
    length: int  # upstairs orbit length delta * n
    geometry: ChannelGeometry = field(repr=False)

    @property
    def size(self) -> int:
        return self.geometry.theta * self.count * self.length


def _layout(spec: BehaviorSpec) -> list[Block]:
    G = spec.group
    geoms: dict[tuple[int, int, int], ChannelGeometry] = {}
    blocks, offset = [], 0
    for (c, d, t, n), b in spec.entries.items():
        if (c, d, t) not in geoms:
            geoms[(c, d, t)] = select_channel_geometry(G, c, (d, t))
        blk = Block((c, d, t, n), offset, b, d * n, geoms[(c, d, t)])
        blocks.append(blk)
        offset += blk.size
    return blocks


def build_system(spec: BehaviorSpec) -> FiniteDynSystem:
    """Points of a block are numbered (s, i, m) -> offset + (s_index*b + i)*L + m."""
    G = spec.group
    blocks = _layout(spec)
    total = sum(b.size for b in blocks)
    gens = G.generators or tuple(g for g in G if g != G.identity)[:1] or (G.identity,)
    T = np.empty(total, dtype=np.int64)
    tables = {g: np.empty(total, dtype=np.int64) for g in gens}
    for blk in blocks:
        geom, L, b = blk.geometry, blk.length, blk.count
        n = L // geom.delta
        m = np.arange(L)
        ii = np.arange(b)[:, None] * L
        for si, s in enumerate(geom.transversal):
            base = blk.offset + si * b * L
            T[base + ii + m] = base + ii + (m + 1) % L
            for g in gens:
                s_new, l = decompose(G, geom, g, s)
                target = blk.offset + geom.transversal.index(s_new) * b * L
                tables[g][base + ii + m] = target + ii + (m + l * n) % L
    return make_system(G, T, tables)


def block_of(spec: BehaviorSpec, point: int) -> tuple[ChannelKey, int, int, int]:
    """Decode a point index into (channel key, s, i, m)."""
    for blk in _layout(spec):
        if blk.offset <= point < blk.offset + blk.size:
            r = point - blk.offset
            si, rest = divmod(r, blk.count * blk.length)
            i, m = divmod(rest, blk.length)
            return blk.key, blk.geometry.transversal[si], i, m
    raise IndexError(point)


def predicted_counts(spec: BehaviorSpec, N: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(a_1..a_N, b_1..b_N): a_n sums theta*b at n/delta, b_n sums the counts at n."""
    a = [0] * N
    b = [0] * N
    for (c, d, t, n), count in spec.entries.items():
        if n <= N:
            b[n - 1] += count
        if d * n <= N:
            a[d * n - 1] += t * count
    return tuple(a), tuple(b)


# --- verification ----------------------------------------------------------


@dataclass
class ConstructionReport:
    horizon: int
    predicted_a: tuple[int, ...]
    predicted_b: tuple[int, ...]
    observed_a: tuple[int, ...]
    observed_b: tuple[int, ...]
    valid_system: bool
    channel_mismatches: list[str]
    points: int
    census: Optional[BehaviorCensus] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return (
            self.valid_system
            and self.predicted_a == self.observed_a
            and self.predicted_b == self.observed_b
            and not self.channel_mismatches
        )


def census_matches_spec(spec: BehaviorSpec, census: BehaviorCensus) -> list[str]:
    """Upstairs census must hold theta*b orbits of length delta*n in every channel, nothing else."""
    expected: dict[tuple[int, int, int, int], int] = {}
    for (c, d, t, n), b in spec.entries.items():
        key = (c, d, t, d * n)
        expected[key] = expected.get(key, 0) + t * b
    out = []
    for key in sorted(set(expected) | set(census.counts)):
        if expected.get(key, 0) != census.counts.get(key, 0):
            out.append(f"channel {key}: expected {expected.get(key, 0)} orbits, found {census.counts.get(key, 0)}")
    return out


def verify_construction(spec: BehaviorSpec, N: int, sys: Optional[FiniteDynSystem] = None) -> ConstructionReport:
    sys = sys if sys is not None else build_system(spec)
    valid = validate_system(sys).ok
    a, b = predicted_counts(spec, N)
    up = period_counts(sys, N)
    down = quotient_period_counts(build_quotient(sys), N)
    census = behavior_census(sys, N) if valid else None
    mismatches = census_matches_spec(spec, census) if census is not None else ["system failed validation"]
    return ConstructionReport(N, a, b, up.O, down.O, valid, mismatches, sys.size, census)


def random_spec(
    G: FiniteGroup,
    rng: random.Random,
    max_count: int = 3,
    max_n: int = 4,
    density: float = 0.25,
) -> BehaviorSpec:
    """Sparse random spec over every admissible channel, anchor included."""
    sigma = sigma_table(G)
    entries = {}
    for c, d, t in sigma.all_channels():
        for n in range(1, max_n + 1):
            if rng.random() < density:
                entries[(c, d, t, n)] = rng.randint(1, max_count)
    top = len(conjugacy_classes_of_subgroups(G)) - 1
    entries[(top, 1, 1, 1)] = max(entries.get((top, 1, 1, 1), 0), 1)
    return BehaviorSpec(G, entries)
