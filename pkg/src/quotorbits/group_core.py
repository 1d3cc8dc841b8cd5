"""Finite groups as validated Cayley tables, plus the subgroup invariants
used by the orbit-counting theory (subgroup lattice, conjugacy classes,
normalizers, coset orders and the admissible (delta, theta) channels)."""

from __future__ import annotations

import functools
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

DEFAULT_ORDER_GUARD = 24
ORDER_GUARD_ENV = "QUOTORBITS_ORDER_GUARD"


class GroupError(ValueError):
    pass


class NotAssociative(GroupError):
    def __init__(self, triple: tuple[int, int, int]):
        self.witness = triple
        a, b, c = triple
        super().__init__(f"table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")


class NoIdentity(GroupError):
    def __init__(self):
        super().__init__("table has no two-sided identity")


class NoInverse(GroupError):
    def __init__(self, element: int):
        self.witness = element
        super().__init__(f"element {element} has no two-sided inverse")


class OrderGuardExceeded(GroupError):
    def __init__(self, order: int, guard: int):
        self.order = order
        self.guard = guard
        super().__init__(f"group order {order} exceeds guard {guard} (set {ORDER_GUARD_ENV} to raise it)")


class NotBijective(GroupError):
    def __init__(self, index: int):
        self.witness = index
        super().__init__(f"generator {index} is not a permutation")


class NotInNormalizer(GroupError):
    def __init__(self, element: int):
        self.witness = element
        super().__init__(f"element {element} does not normalize the subgroup")


def order_guard() -> int:
    value = os.environ.get(ORDER_GUARD_ENV)
    return int(value) if value else DEFAULT_ORDER_GUARD


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group on element indices ``0..order-1``.

    ``table[a][b]`` is the product ``a*b``. For groups built from permutations,
    ``a*b`` means "apply ``b`` first, then ``a``", so a left action satisfies
    ``act(a*b, x) == act(a, act(b, x))``.
    """

    table: tuple[tuple[int, ...], ...]
    identity: int
    inverses: tuple[int, ...]
    labels: tuple[str, ...]
    name: str = ""
    generators: tuple[int, ...] = ()
    perms: Optional[tuple[tuple[int, ...], ...]] = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.table)))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverses[g], -k
        result = self.identity
        for _ in range(k):
            result = self.table[g][result]
        return result

    def conj(self, g: int, h: int) -> int:
        """g h g^-1"""
        return self.table[self.table[g][h]][self.inverses[g]]

    def element(self, label: str) -> int:
        """Look up an element by label, or evaluate a ``*``-separated word."""
        if label in self.labels:
            return self.labels.index(label)
        if label.isdigit() and int(label) < self.order:
            return int(label)
        result = self.identity
        for part in label.split("*"):
            part = part.strip()
            if part not in self.labels:
                raise KeyError(f"unknown element label {label!r}")
            result = self.table[result][self.labels.index(part)]
        return result

    @functools.cached_property
    def np_table(self) -> np.ndarray:
        return np.array(self.table, dtype=np.int64)


def _identity_of(t: np.ndarray) -> int:
    n = len(t)
    ar = np.arange(n)
    for e in range(n):
        if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar):
            return e
    raise NoIdentity()


def make_group_from_cayley(
    table: Sequence[Sequence[int]],
    labels: Optional[Sequence[str]] = None,
    name: str = "",
    guard: Optional[int] = None,
) -> FiniteGroup:
    t = np.asarray(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise GroupError("Cayley table must be a non-empty square array")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise GroupError(f"Cayley table entries must lie in 0..{n - 1}")
    guard = order_guard() if guard is None else guard
    if n > guard:
        raise OrderGuardExceeded(n, guard)

    lhs = t[t]  # lhs[a, b, c] = (a*b)*c
    rhs = t[np.arange(n)[:, None, None], t[None, :, :]]  # a*(b*c)
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        raise NotAssociative(tuple(int(v) for v in bad[0]))

    e = _identity_of(t)
    inverses = []
    for x in range(n):
        ys = np.flatnonzero((t[x] == e) & (t[:, x] == e))
        if len(ys) != 1:
            raise NoInverse(x)
        inverses.append(int(ys[0]))

    if labels is None:
        labels = [str(i) for i in range(n)]
    if len(labels) != n:
        raise GroupError("labels must name every element")
    G = FiniteGroup(
        table=tuple(tuple(int(v) for v in row) for row in t),
        identity=e,
        inverses=tuple(inverses),
        labels=tuple(labels),
        name=name,
    )
    object.__setattr__(G, "generators", greedy_generators(G))
    return G


def greedy_generators(G: FiniteGroup) -> tuple[int, ...]:
    """A generating set: scan elements in index order, keep those not yet generated."""
    gens: list[int] = []
    mask = 1 << G.identity
    for g in G:
        if not mask >> g & 1:
            gens.append(g)
            mask = _closure_mask(G, tuple(gens))
    return tuple(gens)


def make_group_from_permutations(
    degree: int,
    generators: Sequence[Sequence[int]],
    labels: Optional[Sequence[str]] = None,
    name: str = "",
    guard: Optional[int] = None,
) -> FiniteGroup:
    """Close a set of permutations of ``0..degree-1`` under composition.

    Elements are numbered in breadth-first order from the identity (index 0);
    element labels are the generator words that first reached them.
    """
    guard = order_guard() if guard is None else guard
    gens = [tuple(int(v) for v in p) for p in generators]
    for i, p in enumerate(gens):
        if len(p) != degree or sorted(p) != list(range(degree)):
            raise NotBijective(i)
    if labels is None:
        labels = [f"g{i}" for i in range(len(gens))]
    if len(labels) != len(gens):
        raise GroupError("need one label per generator")

    ident = tuple(range(degree))
    index = {ident: 0}
    elements = [ident]
    words = ["e"]
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for s, lab in zip(gens, labels):
            q = tuple(s[p[x]] for x in range(degree))
            if q not in index:
                if len(elements) >= guard:
                    raise OrderGuardExceeded(len(elements) + 1, guard)
                index[q] = len(elements)
                elements.append(q)
                w = words[index[p]]
                words.append(lab if w == "e" else f"{lab}*{w}")
                queue.append(q)

    n = len(elements)
    table = tuple(
        tuple(index[tuple(a[b[x]] for x in range(degree))] for b in elements)
        for a in elements
    )
    inverses = []
    for a in range(n):
        inverses.append(next(b for b in range(n) if table[a][b] == 0))
    return FiniteGroup(
        table=table,
        identity=0,
        inverses=tuple(inverses),
        labels=tuple(words),
        name=name,
        generators=tuple(index[s] for s in gens),
        perms=tuple(elements),
    )


def trivial_group() -> FiniteGroup:
    return make_group_from_cayley([[0]], labels=["e"], name="I")


# --- subgroups -------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    elements: tuple[int, ...]
    parent: FiniteGroup = field(compare=False, repr=False, hash=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @functools.cached_property
    def mask(self) -> int:
        return _mask(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self.elements

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def _mask(elements: Iterable[int]) -> int:
    m = 0
    for g in elements:
        m |= 1 << g
    return m


def _members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subgroup_from_mask(G: FiniteGroup, mask: int) -> Subgroup:
    return Subgroup(_members(mask), G)


def generated_subgroup(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    return subgroup_from_mask(G, _closure_mask(G, tuple(gens)))


def _closure_mask(G: FiniteGroup, gens: tuple[int, ...]) -> int:
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = G.table[x][s]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return _mask(seen)


def is_subgroup(G: FiniteGroup, elements: Iterable[int]) -> bool:
    els = set(elements)
    if G.identity not in els:
        return False
    return all(G.table[a][b] in els for a in els for b in els)


def element_order(G: FiniteGroup, g: int) -> int:
    k, x = 1, g
    while x != G.identity:
        x = G.table[g][x]
        k += 1
    return k


def delta_set(G: FiniteGroup, H: Subgroup) -> frozenset[int]:
    """Orders of the elements of H."""
    return frozenset(element_order(G, h) for h in H)


@functools.cache
def _subgroup_masks(G: FiniteGroup) -> tuple[int, ...]:
    guard = order_guard()
    if G.order > guard:
        raise OrderGuardExceeded(G.order, guard)
    cyclic = sorted({_closure_mask(G, (g,)) for g in G})
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        new = []
        for H in frontier:
            for C in cyclic:
                if C & ~H == 0:
                    continue
                J = _closure_mask(G, _members(H | C))
                if J not in found:
                    found.add(J)
                    new.append(J)
        frontier = new
    return tuple(sorted(found, key=lambda m: (bin(m).count("1"), _members(m))))


def enumerate_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """All subgroups, sorted by (order, element tuple)."""
    return [subgroup_from_mask(G, m) for m in _subgroup_masks(G)]


def conjugate_mask(G: FiniteGroup, g: int, mask: int) -> int:
    return _mask(G.conj(g, h) for h in _members(mask))


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    m = H.mask
    return Subgroup(tuple(g for g in G if conjugate_mask(G, g, m) == m), G)


def coset_order(G: FiniteGroup, H: Subgroup, g: int) -> int:
    """Least k >= 1 with g^k in H; g must normalize H."""
    if conjugate_mask(G, g, H.mask) != H.mask:
        raise NotInNormalizer(g)
    k, x = 1, g
    while x not in H.elements:
        x = G.table[g][x]
        k += 1
    return k


def quotient_delta_set(G: FiniteGroup, H: Subgroup) -> frozenset[int]:
    """Element orders of N_G(H)/H, i.e. coset orders of normalizing elements."""
    return frozenset(coset_order(G, H, g) for g in normalizer(G, H))


def index(G: FiniteGroup, H: Subgroup) -> int:
    return G.order // H.order


# --- conjugacy classes of subgroups ---------------------------------------


@dataclass(frozen=True)
class ConjClass:
    id: int
    representative: Subgroup
    members: tuple[Subgroup, ...]

    @property
    def order(self) -> int:
        return self.representative.order


@dataclass(frozen=True)
class ConjClassTable:
    group: FiniteGroup = field(repr=False)
    classes: tuple[ConjClass, ...]
    mask_to_class: dict[int, int] = field(repr=False)

    def class_of(self, H: Subgroup) -> int:
        return self.mask_to_class[H.mask]

    def class_of_mask(self, mask: int) -> int:
        return self.mask_to_class[mask]

    def class_of_elements(self, elements: Iterable[int]) -> int:
        """Class id of the subgroup with exactly these elements (KeyError if none)."""
        return self.mask_to_class[_mask(elements)]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self) -> Iterator[ConjClass]:
        return iter(self.classes)

    def __getitem__(self, i: int) -> ConjClass:
        return self.classes[i]


@functools.cache
def conjugacy_classes_of_subgroups(G: FiniteGroup) -> ConjClassTable:
    """Classes sorted by (order, canonical representative); the trivial
    subgroup is always class 0 and G itself the last class."""
    masks = _subgroup_masks(G)
    assigned: dict[int, int] = {}
    classes = []
    for m in masks:  # sorted, so the first unassigned member is the canonical one
        if m in assigned:
            continue
        conj = {conjugate_mask(G, g, m) for g in G}
        cid = len(classes)
        members = sorted(conj, key=_members)
        for c in members:
            assigned[c] = cid
        classes.append(
            ConjClass(cid, subgroup_from_mask(G, m), tuple(subgroup_from_mask(G, c) for c in members))
        )
    return ConjClassTable(G, tuple(classes), assigned)


# --- admissible channels ---------------------------------------------------


@dataclass(frozen=True)
class SigmaTable:
    """Admissible (delta, theta) pairs per class, and the extremal constants.

    ``nabla`` is the largest element order, ``h_nabla_class`` the class of a
    largest subgroup H whose N(H)/H has an element of order ``nabla``, and
    ``theta_cap`` = [G:H]/nabla for that H.
    """

    group: FiniteGroup = field(repr=False)
    channels: dict[int, tuple[tuple[int, int], ...]]
    nabla: int
    h_nabla_class: int
    theta_cap: int

    def __getitem__(self, class_id: int) -> tuple[tuple[int, int], ...]:
        return self.channels[class_id]

    def all_channels(self) -> list[tuple[int, int, int]]:
        """Every (class id, delta, theta), in deterministic order."""
        return [(c, d, t) for c in sorted(self.channels) for d, t in self.channels[c]]

    def trivial_class_channels(self) -> tuple[tuple[int, int], ...]:
        return self.channels[0]


@functools.cache
def sigma_table(G: FiniteGroup) -> SigmaTable:
    classes = conjugacy_classes_of_subgroups(G)
    channels = {}
    for cls in classes:
        H = cls.representative
        idx = index(G, H)
        channels[cls.id] = tuple((d, idx // d) for d in sorted(quotient_delta_set(G, H)))
    nabla = max(element_order(G, g) for g in G)
    admitting = [c for c in classes if any(d == nabla for d, _ in channels[c.id])]
    best = max(c.order for c in admitting)
    h_nabla = next(c for c in admitting if c.order == best)
    return SigmaTable(
        group=G,
        channels=channels,
        nabla=nabla,
        h_nabla_class=h_nabla.id,
        theta_cap=index(G, h_nabla.representative) // nabla,
    )
