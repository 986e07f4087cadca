"""Character sums and solution counts"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.core.catalog import SYMBOLS
from app.core.enumeration import (
    RankDistribution,
    gamma_bruteforce,
    gamma_bruteforce_mixed,
    solution_count_bruteforce,
    solution_count_bruteforce_mixed,
)
from app.core.exceptions import BudgetExceededError, ShapeError, UnsupportedError
from app.core.f2core import CoefficientTriple, MixedShape, TripleShape
from app.services.counting_service import (
    MixedPoint,
    exp_sum_direct,
    exp_sum_expected,
    exp_sum_mixed,
    factor_pow2,
    format_pow2,
)


def test_factor_pow2():
    assert factor_pow2(3563904 << 18) == (27843, 25)
    assert factor_pow2(7) == (7, 0)
    assert factor_pow2(0) == (0, 0)
    assert format_pow2(13281 << 20) == "13281·2^20"
    assert format_pow2(543) == "543"


def test_zero_point_sums_every_unknown():
    shape = TripleShape(1, 0, 0, 1)
    point = CoefficientTriple.zero(shape)
    assert exp_sum_direct(point, shape) == 16
    assert exp_sum_expected(point, shape) == 16


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_character_sum_matches_rank(data):
    shape = data.draw(st.sampled_from([TripleShape(1, 0, 0, 3), TripleShape(1, 1, 0, 2), TripleShape(2, 0, 1, 2)]))
    la, lb, lg = shape.coset_lengths
    point = CoefficientTriple.from_ints(
        data.draw(st.integers(0, (1 << la) - 1)),
        data.draw(st.integers(0, (1 << lb) - 1)),
        data.draw(st.integers(0, (1 << lg) - 1)),
        shape,
    )
    assert exp_sum_direct(point, shape) == exp_sum_expected(point, shape)


def test_character_sum_rejects_foreign_point():
    point = CoefficientTriple.zero(TripleShape(1, 0, 0, 2))
    with pytest.raises(ShapeError):
        exp_sum_direct(point, TripleShape(1, 0, 0, 3))


def test_mixed_character_sum():
    ms = MixedShape(1, 0, 0, 2)
    assert exp_sum_mixed(MixedPoint((0,), 0, 0), ms) == 1 << (ms.k + ms.total_rows)
    with pytest.raises(ShapeError):
        exp_sum_mixed(MixedPoint((0, 0), 0, 0), ms)


def test_single_summand_identity(counting):
    # R_1 = 2^R + 2^k - 1
    for shape in (TripleShape(1, 0, 0, 2), TripleShape(1, 1, 0, 3), TripleShape(2, 0, 0, 3)):
        dist = gamma_bruteforce(shape)
        got = counting.r_q(1, shape.k, shape.s, shape.m, dist)
        assert got == (1 << shape.total_rows) + (1 << shape.k) - 1


def test_solution_count_matches_enumeration(counting):
    dist = gamma_bruteforce(TripleShape(1, 0, 0, 2))
    assert counting.r_q(2, 2, 1, 0, dist) == solution_count_bruteforce(2, 2, 1, 0, 0) == 142


def test_solution_count_three_square_blocks(counting):
    value, dist = counting.count_solutions(3, 5, 0, s=3)
    assert dist.counts == (1, 21, 378, 6832, 103488, 1986432)
    assert value == 3563904 << 6
    one, _ = counting.count_solutions(1, 5, 0, s=3)
    assert one == 543


def test_solution_count_from_golden_table(counting, tables):
    table = tables.get_table("ssm-s3-m4-k7")
    dist = RankDistribution(TripleShape(3, 4, 0, 7), tuple(table.values(7)))
    assert counting.r_q(3, 7, 3, 4, dist) == 4243395 << 29


def test_third_block_offset_needs_opt_in(counting):
    dist = gamma_bruteforce(TripleShape(1, 0, 1, 2))
    with pytest.raises(UnsupportedError):
        counting.r_q_general(2, 2, 1, 0, 1, dist)
    assert counting.r_q_general(2, 2, 1, 0, 1, dist, allow_extrapolated=True) == solution_count_bruteforce(2, 2, 1, 0, 1)


def test_distribution_must_match_parameters(counting):
    dist = gamma_bruteforce(TripleShape(1, 0, 0, 2))
    with pytest.raises(ShapeError):
        counting.r_q(2, 3, 1, 0, dist)
    with pytest.raises(ShapeError):
        counting.r_q(0, 2, 1, 0, dist)


def test_mixed_solution_count(counting, tables):
    table = tables.get_table("mixed-n2-m1-l3-k5")
    dist = RankDistribution(MixedShape(2, 1, 3, 5), tuple(table.values(5)))
    assert counting.r_q_mixed(3, 2, 1, 3, 5, dist) == 13281 << 20


def test_mixed_exponent_variants(counting):
    ms = MixedShape(1, 0, 0, 2)
    dist = gamma_bruteforce_mixed(ms)
    corrected = counting.r_q_mixed(1, 1, 0, 0, 2, dist, corrected=True)
    assert corrected == solution_count_bruteforce_mixed(1, ms) == 11
    assert counting.r_q_mixed(1, 1, 0, 0, 2, dist) == corrected << 2


def test_count_solutions_dispatch(counting):
    value, dist = counting.count_solutions(1, 2, 0, n=1, corrected=True)
    assert value == 11
    assert dist.method == "mixed"
    with pytest.raises(ShapeError):
        counting.count_solutions(1, 2, 0, s=1, n=1)
    with pytest.raises(ShapeError):
        counting.count_solutions(1, 2, 0)


def test_symbolic_count(counting, tables):
    dist = counting.recurrence.distribution(TripleShape(2, 0, 0, 6))
    expr = counting.r_q_symbolic(6, 2, 0, 0, dist)
    q = SYMBOLS["q"]
    assert int(expr.subs(q, 1)) == 127
    assert int(expr.subs(q, 2)) == 21400
    count = tables.get_count("count-s2-k6-symbolic")
    for sample in count.q_samples:
        assert int(expr.subs(q, sample)) == count.expected(sample)


def test_invertible_fraction(counting):
    dist = gamma_bruteforce(TripleShape(1, 0, 0, 3))
    assert counting.invertible_fraction(1, 0, dist) == Fraction(21, 64)
    with pytest.raises(ShapeError):
        counting.invertible_fraction(1, 1, dist)


def test_global_sum_counts_solutions(counting):
    shape = TripleShape(1, 0, 0, 2)
    dist = gamma_bruteforce(shape)
    for q in (1, 2):
        assert counting.exp_sum_total(shape, q) == counting.r_q(q, 2, 1, 0, dist)


def test_global_sum_budget(counting):
    with pytest.raises(BudgetExceededError):
        counting.exp_sum_total(TripleShape(2, 1, 1, 4), 1, bit_budget=10)
