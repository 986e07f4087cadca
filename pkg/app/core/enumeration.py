"""
Brute-force oracles over F2

Enumerates every coefficient tuple of a stacked persymmetric shape and counts
ranks exactly. Tuples are processed in numpy batches: the coefficient index x
packs (alpha, beta, gamma) with gamma in the low bits, each block row is a
shifted mask of its coefficient word, and ranks of a whole batch are computed
by column-wise elimination on uint64 row arrays. The index space is split into
contiguous chunks (that is, on the top bits of alpha) which a process pool may
evaluate independently; partial counts are merged by addition in chunk order.
"""

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union
import logging
import time

import numpy as np

from app.config import settings
from app.core import gf2x
from app.core.exceptions import BudgetExceededError, ShapeError
from app.core.f2core import DoubleShape, MixedShape, TripleShape

logger = logging.getLogger(__name__)

Shape = Union[TripleShape, DoubleShape, MixedShape]

_ONE = np.uint64(1)


class Method(str, Enum):
    """How a distribution was obtained"""
    BRUTE = "brute"
    CLOSED = "closed"
    RECURRENCE = "recurrence"
    MIXED = "mixed"


@dataclass(frozen=True)
class RankDistribution:
    """Exact counts of coefficient tuples by rank of their stacked matrix."""

    shape: Shape
    counts: Tuple[int, ...]
    method: str = Method.BRUTE.value
    provenance: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.counts) != self.shape.max_rank + 1:
            raise ShapeError(
                f"{len(self.counts)} counts for a shape of maximal rank {self.shape.max_rank}"
            )

    def __getitem__(self, i: int) -> int:
        """Gamma_i, zero outside 0..max_rank."""
        if 0 <= i < len(self.counts):
            return self.counts[i]
        return 0

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class JointRankProfile:
    """
    Counts of rank 8-tuples for the four nested stacks
    [s-1, s+m-1, s+m+l-1], [s, s+m-1, s+m+l-1], [s, s+m, s+m+l-1], [s, s+m, s+m+l],
    listed stack by stack as (rank at width k-1, rank at width k).
    """

    shape: TripleShape
    counts: Dict[Tuple[int, ...], int]

    def __getitem__(self, profile: Tuple[int, ...]) -> int:
        return self.counts.get(tuple(profile), 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def diagonal(self) -> List[int]:
        """sigma_i: tuples whose four stacks all have rank i at width k."""
        sigma = [0] * (self.shape.max_rank + 1)
        for profile, count in self.counts.items():
            at_k = profile[1::2]
            if len(set(at_k)) == 1:
                sigma[at_k[0]] += count
        return sigma


def _require_budget(bits: int, bit_budget: Optional[int], what: str) -> int:
    budget = settings.BIT_BUDGET if bit_budget is None else bit_budget
    if bits > budget:
        raise BudgetExceededError(bits, budget, what)
    return budget


def batch_rank(rows: np.ndarray, k: int) -> np.ndarray:
    """
    Ranks of a batch of F2 matrices.

    rows has shape (n_rows, batch); column j of the batch is one matrix whose
    packed rows are rows[:, j]. The array is modified in place.
    """
    n_rows, batch = rows.shape
    ranks = np.zeros(batch, dtype=np.int64)
    if n_rows == 0:
        return ranks
    columns = np.arange(batch)
    zero = np.uint64(0)
    for c in range(k):
        bit = ((rows >> np.uint64(c)) & _ONE).astype(bool)
        has = bit.any(axis=0)
        pivot = rows[bit.argmax(axis=0), columns]
        # the pivot row cancels itself, which retires it
        rows ^= np.where(bit, pivot[None, :], zero)
        ranks += has
    return ranks


def _block_rows(coeffs: np.ndarray, rows: int, k: int) -> List[np.ndarray]:
    width = np.uint64((1 << k) - 1)
    return [(coeffs >> np.uint64(i)) & width for i in range(rows)]


def _split_index(x: np.ndarray, lengths: Sequence[int]) -> List[np.ndarray]:
    """Split packed indices into coefficient words; the last length is lowest."""
    words = []
    shift = 0
    for length in reversed(lengths):
        words.append((x >> np.uint64(shift)) & np.uint64((1 << length) - 1))
        shift += length
    return list(reversed(words))


def _persymmetric_batch(x: np.ndarray, blocks: Sequence[int], k: int) -> List[List[np.ndarray]]:
    lengths = [k + rows - 1 for rows in blocks]
    return [_block_rows(word, rows, k) for word, rows in zip(_split_index(x, lengths), blocks)]


def _stack_chunk(task: Tuple[Tuple[int, ...], int, int, int]) -> np.ndarray:
    blocks, k, start, stop = task
    x = np.arange(start, stop, dtype=np.uint64)
    rows = [row for block in _persymmetric_batch(x, blocks, k) for row in block]
    ranks = batch_rank(np.array(rows, dtype=np.uint64), k)
    return np.bincount(ranks, minlength=min(k, sum(blocks)) + 1)


def _mixed_chunk(task: Tuple[int, int, int, int, int, int]) -> np.ndarray:
    n, m, l, k, start, stop = task
    x = np.arange(start, stop, dtype=np.uint64)
    words = _split_index(x, [k] * n + [k + m, k + m + l])
    rows = list(words[:n])
    rows += _block_rows(words[n], 1 + m, k)
    rows += _block_rows(words[n + 1], 1 + m + l, k)
    ranks = batch_rank(np.array(rows, dtype=np.uint64), k)
    return np.bincount(ranks, minlength=min(k, n + 2 * m + l + 2) + 1)


def _nested_stacks(shape: TripleShape) -> List[Tuple[int, int, int]]:
    s, m, l = shape.s, shape.m, shape.l
    return [
        (s - 1, s + m - 1, s + m + l - 1),
        (s, s + m - 1, s + m + l - 1),
        (s, s + m, s + m + l - 1),
        (s, s + m, s + m + l),
    ]


def _profile_chunk(task: Tuple[Tuple[int, int, int, int], int, int]) -> Dict[Tuple[int, ...], int]:
    (s, m, l, k), start, stop = task
    shape = TripleShape(s, m, l, k)
    x = np.arange(start, stop, dtype=np.uint64)
    alpha, beta, gamma = _persymmetric_batch(x, shape.blocks, k)
    narrow = np.uint64((1 << (k - 1)) - 1)
    columns = []
    for r1, r2, r3 in _nested_stacks(shape):
        rows = np.array(alpha[:r1] + beta[:r2] + gamma[:r3], dtype=np.uint64).reshape(-1, len(x))
        columns.append(batch_rank(rows & narrow, k - 1))
        columns.append(batch_rank(rows.copy(), k))
    keys = np.zeros(len(x), dtype=np.int64)
    for column in columns:
        keys = (keys << 6) | column
    values, counts = np.unique(keys, return_counts=True)
    profiles = {}
    for key, count in zip(values.tolist(), counts.tolist()):
        profile = tuple((key >> (6 * (7 - slot))) & 63 for slot in range(8))
        profiles[profile] = count
    return profiles


def _chunks(bits: int, chunk_bits: Optional[int]) -> List[Tuple[int, int]]:
    chunk_bits = settings.CHUNK_BITS if chunk_bits is None else chunk_bits
    size = 1 << min(bits, chunk_bits)
    return [(start, start + size) for start in range(0, 1 << bits, size)]


def _run(worker: Callable, tasks: list, workers: Optional[int]) -> list:
    workers = settings.WORKERS if workers is None else workers
    if workers <= 1 or len(tasks) == 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks))


def _merge_counts(parts: List[np.ndarray], length: int) -> Tuple[int, ...]:
    totals = [0] * length
    for part in parts:
        for i, value in enumerate(part.tolist()):
            totals[i] += value
    return tuple(totals)


def enumerate_blocks(
    blocks: Sequence[int],
    k: int,
    bit_budget: Optional[int] = None,
    workers: Optional[int] = None,
    chunk_bits: Optional[int] = None,
) -> Tuple[int, ...]:
    """Rank counts of any stack of persymmetric blocks of width k."""
    blocks = tuple(blocks)
    bits = sum(k + rows - 1 for rows in blocks)
    _require_budget(bits, bit_budget, f"enumeration of {list(blocks)} x {k}")
    if bits > 64:
        raise BudgetExceededError(bits, 64, "packed enumeration index")

    started = time.perf_counter()
    tasks = [(blocks, k, start, stop) for start, stop in _chunks(bits, chunk_bits)]
    counts = _merge_counts(_run(_stack_chunk, tasks, workers), min(k, sum(blocks)) + 1)
    logger.info(
        f"Enumerated {list(blocks)} x {k}: 2^{bits} tuples, {len(tasks)} chunks "
        f"in {time.perf_counter() - started:.2f}s"
    )
    return counts


def gamma_bruteforce(
    shape: TripleShape,
    bit_budget: Optional[int] = None,
    workers: Optional[int] = None,
) -> RankDistribution:
    counts = enumerate_blocks(shape.blocks, shape.k, bit_budget, workers)
    return RankDistribution(shape, counts, Method.BRUTE.value, ("enumeration",))


def gamma_bruteforce_double(
    rows1: int,
    rows2: int,
    k: int,
    bit_budget: Optional[int] = None,
    workers: Optional[int] = None,
) -> RankDistribution:
    shape = DoubleShape(rows1, rows2, k)
    counts = enumerate_blocks((rows1, rows2), k, bit_budget, workers)
    return RankDistribution(shape, counts, Method.BRUTE.value, ("enumeration",))


def gamma_bruteforce_mixed(
    ms: MixedShape,
    bit_budget: Optional[int] = None,
    workers: Optional[int] = None,
) -> RankDistribution:
    bits = ms.coefficient_bits
    _require_budget(bits, bit_budget, f"enumeration of mixed {ms.as_dict()}")
    if bits > 64:
        raise BudgetExceededError(bits, 64, "packed enumeration index")
    tasks = [(ms.n, ms.m, ms.l, ms.k, start, stop) for start, stop in _chunks(bits, None)]
    counts = _merge_counts(_run(_mixed_chunk, tasks, workers), ms.max_rank + 1)
    logger.info(f"Enumerated mixed {ms.as_dict()}: 2^{bits} tuples")
    return RankDistribution(ms, counts, Method.BRUTE.value, ("enumeration",))


def joint_profiles(
    shape: TripleShape,
    bit_budget: Optional[int] = None,
    workers: Optional[int] = None,
) -> JointRankProfile:
    if shape.k < 2:
        raise ShapeError("joint profiles need k >= 2")
    bits = shape.coefficient_bits
    _require_budget(bits, bit_budget, f"joint profiles of {shape.as_dict()}")
    params = (shape.s, shape.m, shape.l, shape.k)
    tasks = [(params, start, stop) for start, stop in _chunks(bits, None)]
    merged: Counter = Counter()
    for part in _run(_profile_chunk, tasks, workers):
        merged.update(part)
    return JointRankProfile(shape, dict(sorted(merged.items())))


def sigma_diagonal(
    shape: TripleShape,
    bit_budget: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[int]:
    return joint_profiles(shape, bit_budget, workers).diagonal()


def _count_zero_sums(ys: Sequence[int], cap_rows: int) -> int:
    """Tuples (W_1..W_q), deg W_i < cap_rows, with sum Y_i W_i = 0."""
    q = len(ys)
    total = 0
    for packed in range(1 << (q * cap_rows)):
        acc = 0
        for index, y in enumerate(ys):
            acc ^= gf2x.mul(y, (packed >> (index * cap_rows)) & ((1 << cap_rows) - 1))
        if acc == 0:
            total += 1
    return total


def _solution_count(q: int, k: int, caps: Sequence[int]) -> int:
    total = 0
    for packed in range(1 << (q * k)):
        ys = [(packed >> (index * k)) & ((1 << k) - 1) for index in range(q)]
        product = 1
        for cap in caps:
            product *= _count_zero_sums(ys, cap)
        total += product
    return total


def solution_count_bruteforce(
    q: int,
    k: int,
    s: int,
    m: int,
    l: int,
    bit_budget: Optional[int] = None,
) -> int:
    """
    Number of (Y_i, Z_i, U_i, V_i), i = 1..q, with deg Y_i <= k-1, deg Z_i <= s-1,
    deg U_i <= s+m-1, deg V_i <= s+m+l-1 and
    sum Y_i Z_i = sum Y_i U_i = sum Y_i V_i = 0.

    For a fixed Y tuple the three equations involve disjoint unknowns, so each
    is counted on its own loop and the counts multiply.
    """
    if q < 1 or k < 1 or s < 1 or m < 0 or l < 0:
        raise ShapeError(f"invalid parameters q={q} k={k} s={s} m={m} l={l}")
    bits = q * (k + s + (s + m) + (s + m + l))
    _require_budget(bits, bit_budget, "solution enumeration")
    return _solution_count(q, k, (s, s + m, s + m + l))


def solution_count_bruteforce_mixed(
    q: int,
    ms: MixedShape,
    bit_budget: Optional[int] = None,
) -> int:
    """
    Solutions of the mixed system with deg Y_i <= k-1, deg Z_i <= m,
    deg U_i <= m+l and n constants V_j^(i), matching the rows of
    D^[(n), 1+m, 1+m+l] x k.
    """
    if q < 1:
        raise ShapeError(f"q must be positive, got {q}")
    bits = q * (ms.k + (1 + ms.m) + (1 + ms.m + ms.l) + ms.n)
    _require_budget(bits, bit_budget, "mixed solution enumeration")
    return _solution_count(q, ms.k, (1 + ms.m, 1 + ms.m + ms.l) + (1,) * ms.n)
