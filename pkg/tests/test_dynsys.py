import numpy as np
import pytest
from hypothesis import given, strategies as st

from quotorbits.catalog import catalog_group
from quotorbits.dynsys import (
    ActionIncomplete,
    DynSystemError,
    StabilizerNotTInvariant,
    counts_from_lengths,
    cycle_labels,
    disjoint_union,
    make_system,
    orbits,
    partition_by_class,
    period_counts,
    stabilizer,
    stabilizer_classes,
    validate_system,
)

from .oracles import action_is_homomorphism, period_counts_by_iteration
from .strategies import equivariant_systems


@given(st.permutations(list(range(9))))
def test_period_counts_match_iteration(perm):
    G = catalog_group("C2")
    sys_ = make_system(G, perm)
    pc = period_counts(sys_, 12)
    O, F = period_counts_by_iteration(perm, 12)
    assert list(pc.O) == O
    assert list(pc.F) == F
    assert list(pc.pi) == list(np.cumsum(O))


@given(st.permutations(list(range(12))))
def test_cycle_labels(perm):
    label, lengths = cycle_labels(np.array(perm))
    for x in range(12):
        y, k = perm[x], 1
        members = {x}
        while y != x:
            members.add(y)
            y, k = perm[y], k + 1
        assert lengths[x] == k
        assert label[x] == min(members)


def test_counts_from_lengths():
    pc = counts_from_lengths([1, 2, 2, 4], 4)
    assert pc.O == (1, 2, 0, 1)
    assert pc.F == (1, 5, 1, 9)
    assert pc.orbits_of_length(2) == 2
    assert pc.points_of_period(4) == 9


def test_period_counts_horizon():
    sys_ = make_system(catalog_group("C2"), [0])
    with pytest.raises(ValueError):
        period_counts(sys_, 0)


@given(equivariant_systems())
def test_generated_systems_validate(sys_):
    rep = validate_system(sys_)
    assert rep.ok, rep.messages()
    full = sys_.full_action
    assert action_is_homomorphism(sys_.group.table, full.tolist())
    for g in sys_.group:
        assert np.array_equal(full[g][sys_.T], sys_.T[full[g]])


@given(equivariant_systems())
def test_stabilizer_constant_on_orbits(sys_):
    cls = stabilizer_classes(sys_)
    assert np.array_equal(cls, cls[sys_.T])
    parts = partition_by_class(sys_)
    assert sorted(np.concatenate(list(parts.values())).tolist()) == list(range(sys_.size))
    for x in range(0, sys_.size, 3):
        H = stabilizer(sys_, x)
        assert all(sys_.act(g, x) == x for g in H)


def test_validate_reports_noncommuting_action():
    G = catalog_group("C2")
    # T a 3-cycle, g swaps two of the points: does not commute
    sys_ = make_system(G, [1, 2, 0], {G.element("g"): [1, 0, 2]})
    rep = validate_system(sys_)
    assert not rep.ok
    assert rep.commutation_violations > 0
    assert rep.commutation_witnesses


def test_validate_reports_bad_T():
    sys_ = make_system(catalog_group("C2"), [0, 0])
    rep = validate_system(sys_)
    assert not rep.ok and not rep.t_bijective


def test_action_not_homomorphism():
    G = catalog_group("C3")
    # g has order 3 in G but acts as a transposition
    sys_ = make_system(G, [0, 1], {G.element("g"): [1, 0]})
    rep = validate_system(sys_)
    assert not rep.ok
    assert any("homomorphism" in m for m in rep.action_problems)
    with pytest.raises(ActionIncomplete):
        sys_.full_action


def test_non_periodic_stabilizer():
    # the group fixes point 0 but not T(0); such a T cannot commute with the action
    G = catalog_group("C2")
    sys_ = make_system(G, [1, 0, 2], {G.element("g"): [0, 2, 1]})
    with pytest.raises(StabilizerNotTInvariant):
        partition_by_class(sys_)


def test_disjoint_union():
    G = catalog_group("C2")
    a = make_system(G, [1, 0], {G.element("g"): [1, 0]})
    b = make_system(G, [0], {G.element("g"): [0]})
    u = disjoint_union(a, b)
    assert u.size == 3
    assert list(u.T) == [1, 0, 2]
    assert [o.length for o in orbits(u)] == [2, 1]
    with pytest.raises(DynSystemError):
        disjoint_union(a, make_system(catalog_group("C3"), [0]))
