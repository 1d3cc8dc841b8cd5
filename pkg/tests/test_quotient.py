from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from quotorbits.catalog import catalog_group
from quotorbits.dynsys import PeriodCounts, make_system, orbits, period_counts, stabilizer
from quotorbits.group_core import sigma_table
from quotorbits.quotient import (
    GLUEING,
    SHORTENING,
    SURVIVING,
    DecompositionMismatch,
    HorizonTooSmall,
    IllDefinedInducedMap,
    behavior_census,
    bounds_from_counts,
    build_quotient,
    census_violations,
    check_bounds,
    classify_all,
    growth_estimate,
    lemma_suite,
    min_glue_by_delta,
    quotient_period_counts,
)

from .conftest import c2xc2_counterexample, glue_only_c2, survive_shorten_d8
from .oracles import orbit_behaviour_by_definition, period_counts_by_iteration, quotient_by_definition
from .strategies import equivariant_systems, suspensions


@given(equivariant_systems())
def test_quotient_matches_definition(sys_):
    q = build_quotient(sys_)
    classes, Tq = quotient_by_definition(sys_.T.tolist(), sys_.full_action.tolist())
    assert q.size == len(classes)
    assert [set(c) for c in q.classes()] == [set(c) for c in classes]
    assert q.Tprime.tolist() == Tq
    # projection intertwines T and T'
    assert np.array_equal(q.projection[sys_.T], q.Tprime[q.projection])
    O, F = period_counts_by_iteration(Tq, 8)
    pc = quotient_period_counts(q, 8)
    assert list(pc.O) == O and list(pc.F) == F


@given(equivariant_systems())
def test_classification_matches_definition(sys_):
    full = sys_.full_action.tolist()
    T = sys_.T.tolist()
    sig = sigma_table(sys_.group)
    for b in classify_all(sys_):
        L, d, t, stab = orbit_behaviour_by_definition(T, full, b.orbit.representative)
        assert (b.orbit.length, b.delta, b.theta) == (L, d, t)
        assert set(stabilizer(sys_, b.orbit.representative).elements) == stab
        assert (b.delta, b.theta) in sig[b.class_id]
        assert sys_.act(b.witness, b.orbit.representative) in b.orbit.points


@given(equivariant_systems())
def test_lemma_suite_clean_on_generated_systems(sys_):
    rep = lemma_suite(sys_, 8)
    assert rep.ok, rep.violations[:3]
    assert rep.orbits_checked == len(orbits(sys_))


@given(equivariant_systems())
def test_census_identities(sys_):
    census = behavior_census(sys_, 6)
    assert census_violations(census, sigma_table(sys_.group)) == []
    for n in range(1, 7):
        down = sum(census.downstairs_by_channel(n).values(), Fraction(0))
        assert down == census.quotient_counts[n - 1]


@given(suspensions())
def test_single_suspension_channel(sys_):
    """One suspension over G/H is a single channel: delta = coset order of n, stabilizer class [H]."""
    census = behavior_census(sys_, 4)
    assert len({(c, d, t) for (c, d, t, _) in census.counts}) == 1


def test_behavior_kinds():
    G = catalog_group("C2")
    g = G.element("g")
    fixed = make_system(G, [0], {g: [0]})
    glued = make_system(G, [0, 1], {g: [1, 0]})
    short = make_system(G, [1, 0], {g: [1, 0]})
    assert [b.kind for b in classify_all(fixed)] == [SURVIVING]
    assert [b.kind for b in classify_all(glued)] == [GLUEING, GLUEING]
    assert [b.kind for b in classify_all(short)] == [SHORTENING]


def test_ill_defined_induced_map():
    G = catalog_group("C2")
    # g pairs 0 with 1 but T sends them to different orbits
    sys_ = make_system(G, [0, 2, 1], {G.element("g"): [1, 0, 2]})
    with pytest.raises(IllDefinedInducedMap):
        build_quotient(sys_)


def test_census_detects_bad_counts():
    G = catalog_group("C2")
    sys_ = make_system(G, [0, 1], {G.element("g"): [1, 0]})
    census = behavior_census(sys_, 2)
    census.counts[(0, 1, 2, 1)] = 3  # tamper
    names = {name for name, _ in census_violations(census)}
    assert "upstairs decomposition" in names and "glue divisibility" in names


def test_census_strict_raises_on_tampered_sigma(monkeypatch):
    import quotorbits.quotient as qmod

    class Fake:
        nabla = 2

        def __getitem__(self, c):
            return ()

    G = catalog_group("C2")
    sys_ = make_system(G, [0], {G.element("g"): [0]})
    monkeypatch.setattr(qmod, "sigma_table", lambda G: Fake())
    with pytest.raises(DecompositionMismatch):
        behavior_census(sys_, 1)


# --- bounds ---------------------------------------------------------------


def test_stated_upper_bound_counterexample():
    rep = check_bounds(c2xc2_counterexample(), 4)
    row = rep.rows[0]
    assert row.F_quot == 1 and row.fixed_upper == Fraction(1, 2)
    assert row.O_quot == 1 and row.orbit_upper == Fraction(1, 2)
    assert not rep.ok
    assert rep.ok_uniform
    assert {name for name, _ in rep.violations()} == {"fixed-point bounds", "orbit-count bounds"}
    assert rep.violations(uniform=True) == []


def test_lower_bound_equality_glue_only():
    row = check_bounds(glue_only_c2(), 4).rows[0]
    assert row.F_quot == row.fixed_lower == 1
    assert row.O_quot == row.orbit_lower == 1
    assert row.ok


def test_upper_bound_equality_survive_shorten():
    row = check_bounds(survive_shorten_d8(), 2).rows[0]
    assert row.O_quot == row.orbit_upper == 3
    assert row.ok


@given(equivariant_systems())
def test_lower_and_uniform_bounds_hold(sys_):
    rep = check_bounds(sys_, 6)
    assert all(r.lower_ok for r in rep.rows)
    assert rep.ok_uniform, rep.violations(uniform=True)[:2]


def test_min_glue_by_delta():
    assert min_glue_by_delta(sigma_table(catalog_group("D8"))) == {2: 1, 4: 2}
    assert min_glue_by_delta(sigma_table(catalog_group("S3"))) == {2: 1, 3: 2}


def test_bounds_horizon_checked():
    sys_ = survive_shorten_d8()
    sig = sigma_table(sys_.group)
    up = period_counts(sys_, 4)
    down = quotient_period_counts(build_quotient(sys_), 4)
    with pytest.raises(HorizonTooSmall):
        bounds_from_counts(up, down, sig, 8, 4)


# --- growth diagnostics ---------------------------------------------------


def test_growth_estimate_exact_powers():
    import math

    up = PeriodCounts(6, tuple(2**n for n in range(1, 7)), tuple(2**n for n in range(1, 7)), ())
    down = PeriodCounts(6, tuple(4**n for n in range(1, 7)), tuple(4**n for n in range(1, 7)), ())
    rep = growth_estimate(up, down, nabla=4)
    assert rep.o_exponents[-1] == pytest.approx(math.log(2))
    assert rep.o_exponents_quot[-1] == pytest.approx(math.log(4))
    assert rep.in_window and rep.heuristic
    with pytest.raises(HorizonTooSmall):
        growth_estimate(PeriodCounts(3, (1,) * 3, (1,) * 3, ()), down)
