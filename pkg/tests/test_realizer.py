import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from quotorbits.catalog import catalog_group
from quotorbits.constructor import build_system, predicted_counts
from quotorbits.dynsys import period_counts
from quotorbits.quotient import build_quotient, quotient_period_counts
from quotorbits.realizer import (
    CaseViolation,
    Infeasible,
    PreconditionViolation,
    SequencePair,
    _search,
    a4_residual_one_pair,
    corollary12_case,
    corollary12_instance,
    glue_channels,
    realize_and_verify,
    split_sequences,
    split_with_trace,
)


def _ceil(q):
    return -((-q.numerator) // q.denominator)


def test_glue_channels_order():
    assert glue_channels(catalog_group("C2")) == [(0, 2)]
    thetas = [t for _, t in glue_channels(catalog_group("A4"))]
    assert thetas == [12, 6, 4, 3]
    assert [t for _, t in glue_channels(catalog_group("D8"))] == [8, 4, 2]


@given(st.integers(0, 40), st.integers(0, 12), st.lists(st.integers(2, 9), min_size=1, max_size=4, unique=True))
def test_search_agrees_with_exhaustive(residual, cap, thetas):
    coins = [(i, t) for i, t in enumerate(sorted(thetas, reverse=True))]
    found = _search(residual, cap, coins)
    ranges = [range(0, cap + 1)] * len(coins)
    feasible = any(
        sum(x * (t - 1) for x, (_, t) in zip(xs, coins)) == residual and sum(xs) <= cap
        for xs in itertools.product(*ranges)
    )
    assert (found is not None) == feasible
    if found is not None:
        assert sum(x * (t - 1) for x, (_, t) in zip(found, coins)) == residual
        assert sum(found) <= cap


def test_precondition_violations():
    G = catalog_group("C2")
    with pytest.raises(PreconditionViolation):
        SequencePair((0,), (1,), 2, G)  # a_1 < 1
    with pytest.raises(PreconditionViolation):
        SequencePair((4,), (2,), 2, G)  # b_1 must exceed a_1/|G|
    with pytest.raises(PreconditionViolation):
        SequencePair((1, 5), (1, 2), 3, G)  # n < N: b_n >= a_n/|G|
    with pytest.raises(PreconditionViolation):
        SequencePair((1, 2), (1, 1), 2, G)  # n >= N: a_n <= b_n
    with pytest.raises(PreconditionViolation):
        SequencePair((1, 2, 3, 1), (1, 2), 2, G)  # b_2 > a_4/Theta
    with pytest.raises(PreconditionViolation):
        SequencePair((1,), (1, 1), 2, G)  # a shorter than b


def test_flagged_indices():
    G = catalog_group("C2")
    pair = SequencePair((1, 2, 2), (1, 2, 2), 2, G)
    # nabla * 2 = 4 > len(a): cannot check the upper condition at n = 2, 3
    assert pair.flagged == (2, 3)


@given(st.lists(st.tuples(st.integers(1, 6), st.integers(0, 6)), min_size=1, max_size=6))
def test_c2_verbatim_round_trip(rows):
    """Below the crossover the C2 recipe is exact for every admissible pair."""
    G = catalog_group("C2")
    b = [r[0] for r in rows]
    a = [min(bn + extra, 2 * bn) for bn, extra in rows]
    a[0] = min(a[0], 2 * b[0] - 1)
    pair = SequencePair(tuple(a), tuple(b), len(b) + 1, G)
    result = split_with_trace(pair)
    assert {s.method for s in result.steps} == {"verbatim"}
    for step, an, bn in zip(result.steps, a, b):
        assert step.entries.get((0, 1, 2), 0) == an - bn
        assert step.entries.get((1, 1, 1), 0) == 2 * bn - an
    rep = realize_and_verify(pair)
    assert rep.ok, rep.mismatches()


def test_growth_case_selection():
    D8 = catalog_group("D8")
    assert corollary12_case(D8, Fraction(2), Fraction(2), Fraction(1)) == "same-rate"
    assert corollary12_case(D8, Fraction(2), Fraction(4), Fraction(1)) == "intermediate"
    assert corollary12_case(D8, Fraction(2), Fraction(16), Fraction(1, 2)) == "maximal"
    with pytest.raises(CaseViolation):
        corollary12_case(D8, Fraction(2), Fraction(16), Fraction(1))
    with pytest.raises(CaseViolation):
        corollary12_case(D8, Fraction(1), Fraction(1), Fraction(1))
    with pytest.raises(CaseViolation):
        corollary12_case(D8, Fraction(2), Fraction(32), Fraction(1, 4))


def test_growth_instance_sequences():
    D8 = catalog_group("D8")
    pair = corollary12_instance(D8, 2, 4, 1, 6)
    assert pair.a == tuple(2**n for n in range(1, 4 * 6 + 1))
    # crossover: least N with 4^N < 2^(4N)/2
    assert pair.N == 1
    assert pair.b == tuple(4**n for n in range(1, 7))


def test_growth_instance_fractional_rates():
    G = catalog_group("C2")
    lam, eta = Fraction(3, 2), Fraction(2)
    pair = corollary12_instance(G, lam, eta, 1, 6)
    N = next(k for k in range(1, 50) if eta**k < lam ** (2 * k))
    assert pair.N == N
    assert pair.a[:6] == tuple(_ceil(lam**n) for n in range(1, 7))
    assert pair.b == tuple(_ceil((lam if n < N else eta) ** n) for n in range(1, 7))
    rep = realize_and_verify(pair)
    assert rep.ok, rep.mismatches()


def test_same_rate_small_c_rejected():
    with pytest.raises(PreconditionViolation):
        corollary12_instance(catalog_group("D8"), 2, 2, Fraction(1, 2), 4)


def test_maximal_case_boundary():
    D8 = catalog_group("D8")
    pair = corollary12_instance(D8, 2, 16, Fraction(1, 2), 3)
    assert pair.N == 1
    rep = realize_and_verify(pair)
    assert rep.ok, rep.mismatches()


def test_d8_end_to_end_small():
    pair = corollary12_instance(catalog_group("D8"), 2, 4, 1, 5)
    rep = realize_and_verify(pair)
    assert rep.ok, rep.mismatches()
    assert {s.method for s in rep.steps} == {"recursion"}


def test_search_path_round_trip():
    D8 = catalog_group("D8")
    a = (13,) + tuple(2 ** (n - 1) for n in range(2, 17))
    b = (8, 2, 4, 8)
    pair = SequencePair(a, b, 3, D8)
    result = split_with_trace(pair)
    assert [s.method for s in result.steps] == ["search", "verbatim", "recursion", "recursion"]
    sys_ = build_system(result.spec)
    assert period_counts(sys_, 4).O == a[:4]
    assert quotient_period_counts(build_quotient(sys_), 4).O == b


def test_a4_residual_one_is_infeasible():
    pair = a4_residual_one_pair()
    with pytest.raises(Infeasible) as info:
        split_sequences(pair)
    assert info.value.n == 2
    assert info.value.residual == 1
    # no glue weight theta - 1 of A4 equals 1
    assert all(t - 1 > 1 for _, t in glue_channels(pair.group))


def test_realize_horizon_check():
    pair = corollary12_instance(catalog_group("C2"), 2, 3, 1, 4)
    with pytest.raises(PreconditionViolation):
        realize_and_verify(pair, M=9)


def test_split_matches_predicted_counts():
    pair = corollary12_instance(catalog_group("S3"), 2, 3, 1, 5)
    spec = split_sequences(pair)
    a, b = predicted_counts(spec, 5)
    assert a == pair.a[:5] and b == pair.b
