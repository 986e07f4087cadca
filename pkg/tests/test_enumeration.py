"""Brute-force oracles"""

import numpy as np
import pytest

from app.core.enumeration import (
    batch_rank,
    enumerate_blocks,
    gamma_bruteforce,
    gamma_bruteforce_double,
    gamma_bruteforce_mixed,
    joint_profiles,
    sigma_diagonal,
    solution_count_bruteforce,
    solution_count_bruteforce_mixed,
)
from app.core.exceptions import BudgetExceededError, ShapeError
from app.core.f2core import MixedShape, TripleShape, rank_of_rows
from app.services.formula_service import count_rank_unstructured


def test_single_column_stack():
    dist = gamma_bruteforce(TripleShape(1, 0, 0, 1))
    assert dist.counts == (1, 7)
    assert dist.method == "brute"


@pytest.mark.parametrize("table_id, s, k", [
    ("sss-s1-symbolic", 1, 3),
    ("sss-s1-symbolic", 1, 4),
    ("sss-s2-symbolic", 2, 3),
    ("sss-s2-symbolic", 2, 4),
])
def test_enumeration_matches_symbolic_tables(tables, table_id, s, k):
    dist = gamma_bruteforce(TripleShape(s, 0, 0, k), bit_budget=20)
    assert list(dist.counts) == tables.get_table(table_id).values(k)


def test_counts_sum_to_the_coefficient_space():
    shape = TripleShape(1, 1, 2, 3)
    assert gamma_bruteforce(shape).total == 1 << shape.coefficient_bits


def test_budget_is_enforced():
    with pytest.raises(BudgetExceededError) as info:
        gamma_bruteforce(TripleShape(3, 3, 3, 10), bit_budget=20)
    assert info.value.needed_bits > 20
    assert info.value.budget == 20


def test_chunking_and_workers_do_not_change_counts():
    serial = enumerate_blocks((1, 2, 2), 3, workers=1, chunk_bits=16)
    parallel = enumerate_blocks((1, 2, 2), 3, workers=2, chunk_bits=4)
    assert serial == parallel


def test_batch_rank_agrees_with_scalar_rank():
    rng = np.random.default_rng(7)
    rows = rng.integers(0, 1 << 6, size=(5, 200), dtype=np.uint64)
    expected = [rank_of_rows(int(value) for value in rows[:, j]) for j in range(rows.shape[1])]
    assert batch_rank(rows.copy(), 6).tolist() == expected


def test_double_and_mixed_match_unstructured_counts():
    # blocks of one row are free rows
    k = 4
    double = gamma_bruteforce_double(1, 1, k)
    mixed = gamma_bruteforce_mixed(MixedShape(1, 0, 0, k))
    for i in range(3):
        assert double[i] == count_rank_unstructured(2, k, i)
    for i in range(4):
        assert mixed[i] == count_rank_unstructured(3, k, i)


def test_joint_profiles_cover_every_triple(recurrence):
    shape = TripleShape(2, 0, 0, 3)
    profile = joint_profiles(shape)
    assert profile.total == 1 << shape.coefficient_bits
    # no triple goes from rank 0 at width k-1 to rank 1 at width k in all four stacks
    assert profile[(0, 1) * 4] == 0
    sigma = sigma_diagonal(shape)
    assert sigma == [recurrence.sigma_closed(2, 0, 0, 3, t) for t in range(4)]


def test_joint_profiles_need_two_columns():
    with pytest.raises(ShapeError):
        joint_profiles(TripleShape(1, 0, 0, 1))


def test_solution_enumeration_small_cases():
    # q = 1 counts 2^(3s+2m+l) + 2^k - 1
    assert solution_count_bruteforce(1, 1, 1, 0, 0) == 9
    assert solution_count_bruteforce(1, 2, 1, 0, 0) == 11
    assert solution_count_bruteforce_mixed(1, MixedShape(1, 0, 0, 2)) == 2 ** 3 + 2 ** 2 - 1


def test_solution_enumeration_budget():
    with pytest.raises(BudgetExceededError):
        solution_count_bruteforce(4, 5, 2, 1, 1, bit_budget=20)
