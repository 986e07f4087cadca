"""
Recurrent computation of Gamma

For s >= 2 the count of rank-i stacks [s, s+m, s+m+l] x k follows from the
counts of the seven stacks obtained by removing one row from any nonempty
subset of the three blocks, plus a remainder Delta_i that depends only on
square counts one block size down:

    Gamma_i = 2 G_{i-1}(s-1, .., ..) + 4 G_{i-1}(.., s+m-1, ..) + 8 G_{i-1}(.., .., s+m+l-1)
            - 8 G_{i-2}(s-1, s+m-1, ..) - 16 G_{i-2}(s-1, .., s+m+l-1)
            - 32 G_{i-2}(.., s+m-1, s+m+l-1) + 64 G_{i-3}(s-1, s+m-1, s+m+l-1) + Delta_i

Removing a row can break the ordering s <= s+m <= s+m+l; block sizes are
re-sorted before every lookup since rank does not depend on row order.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple
import logging
import threading

from app.config import settings
from app.core.enumeration import (
    Method,
    RankDistribution,
    gamma_bruteforce,
    gamma_bruteforce_double,
    gamma_bruteforce_mixed,
)
from app.core.exceptions import BudgetExceededError, ShapeError, UnsupportedError
from app.core.f2core import MixedShape, TripleShape
from app.services.formula_service import FormulaService, gamma_mixed_from_doubles, get_formula_service

logger = logging.getLogger(__name__)

# (blocks removed, weight, rank drop) for the seven neighbouring stacks
_NEIGHBOURS = (
    ((1, 0, 0), 2, 1),
    ((0, 1, 0), 4, 1),
    ((0, 0, 1), 8, 1),
    ((1, 1, 0), -8, 2),
    ((1, 0, 1), -16, 2),
    ((0, 1, 1), -32, 2),
    ((1, 1, 1), 64, 3),
)


@dataclass(frozen=True)
class ShapeKey:
    """Canonical memo key: sorted block sizes, width and rank index."""

    blocks: Tuple[int, int, int]
    k: int
    i: int

    @classmethod
    def of(cls, blocks, k: int, i: int) -> "ShapeKey":
        r1, r2, r3 = sorted(blocks)
        return cls((r1, r2, r3), k, i)

    @property
    def shape(self) -> TripleShape:
        return TripleShape.from_blocks(self.blocks, self.k)

    @property
    def rows(self) -> int:
        return sum(self.blocks)


@dataclass(frozen=True)
class MomentReport:
    """Residuals of the two exact moment identities of a distribution."""

    total: int
    expected_total: int
    weighted_residual: Optional[Fraction]

    @property
    def total_residual(self) -> int:
        return self.total - self.expected_total

    @property
    def passed(self) -> bool:
        return self.total_residual == 0 and not self.weighted_residual

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "total_residual": str(self.total_residual),
            "weighted_residual": None if self.weighted_residual is None else str(self.weighted_residual),
        }


class RecurrenceService:
    """Memoized recursion with closed-form and enumeration fallbacks"""

    def __init__(self, formulas: FormulaService, bit_budget: Optional[int] = None, workers: Optional[int] = None):
        self.formulas = formulas
        self.bit_budget = settings.BIT_BUDGET if bit_budget is None else bit_budget
        self.workers = settings.WORKERS if workers is None else workers
        self._memo: Dict[ShapeKey, int] = {}
        self._brute: Dict[TripleShape, RankDistribution] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    # Remainder

    def _square(self, blocks: Tuple[int, int, int], j: int) -> int:
        """Gamma_j of the given blocks at width j."""
        if j < 0:
            return 0
        if j == 0:
            return 1
        return self._gamma(ShapeKey.of(blocks, j, j))

    def sigma_closed(self, s: int, m: int, l: int, k: int, t: int) -> int:
        """
        Number of triples whose four nested stacks, from [s-1, s+m-1, s+m+l-1]
        up to [s, s+m, s+m+l], all have rank t at width k.
        """
        if s < 2:
            raise UnsupportedError("nested stack counts need s >= 2", (s, m, l, k, t))
        rows = 3 * s + 2 * m + l
        if t < 0 or t > min(k, rows - 3):
            return 0
        if t == 0:
            return 1
        smaller = (s - 1, s - 1 + m, s - 1 + m + l)
        if t <= min(k - 1, rows - 4):
            return 8 * self._square(smaller, t) - self._square(smaller, t + 1)
        return 8 * self._square(smaller, t)

    def delta_remainder(self, s: int, m: int, l: int, k: int, i: int) -> int:
        """Delta_i = sigma_i - 7 sigma_(i-1) + 14 sigma_(i-2) - 8 sigma_(i-3)."""
        if s < 2:
            raise UnsupportedError("the remainder is only defined for s >= 2", (s, m, l, k, i))
        if k < 1 or i < 0 or i > 3 * s + 2 * m + l:
            raise ShapeError(f"remainder index out of range: s={s} m={m} l={l} k={k} i={i}")
        sigma = [self.sigma_closed(s, m, l, k, i - back) for back in range(4)]
        return sigma[0] - 7 * sigma[1] + 14 * sigma[2] - 8 * sigma[3]

    # Gamma

    def gamma_recursive(self, shape: TripleShape, i: int) -> int:
        return self._gamma(ShapeKey.of(shape.blocks, shape.k, i))

    def _gamma(self, key: ShapeKey) -> int:
        if key.i < 0 or key.i > min(key.k, key.rows):
            return 0
        if key.i == 0:
            return 1
        with self._lock:
            value = self._memo.get(key)
            if value is not None:
                self.hits += 1
                return value
            self.misses += 1

        a, b, c = key.blocks
        if a == 1:
            value = self._base(key)
        else:
            value = self.delta_remainder(a, b - a, c - b, key.k, key.i)
            for removed, weight, drop in _NEIGHBOURS:
                blocks = (a - removed[0], b - removed[1], c - removed[2])
                value += weight * self._gamma(ShapeKey.of(blocks, key.k, key.i - drop))

        with self._lock:
            self._memo.setdefault(key, value)
        return value

    def _base(self, key: ShapeKey) -> int:
        """s = 1: closed form, else enumeration inside the bit budget."""
        shape = key.shape
        try:
            return self.formulas.closed_form(shape, key.i).value
        except UnsupportedError:
            logger.debug(f"No closed form for {key}, enumerating")
        try:
            return self._bruteforce(shape)[key.i]
        except BudgetExceededError as e:
            raise UnsupportedError(
                f"Gamma_{key.i} of {list(key.blocks)} x {key.k} has no closed form and {e}",
                (shape.s, shape.m, shape.l, shape.k, key.i),
            )

    def _bruteforce(self, shape: TripleShape) -> RankDistribution:
        with self._lock:
            dist = self._brute.get(shape)
        if dist is None:
            dist = gamma_bruteforce(shape, self.bit_budget, self.workers)
            with self._lock:
                self._brute[shape] = dist
        return dist

    # Distributions

    def distribution(self, shape: TripleShape, method: str = "auto") -> RankDistribution:
        """Full distribution by one method, or by the closed -> recurrence -> brute ladder."""
        method = getattr(method, "value", method)
        if method == Method.BRUTE.value:
            return self._bruteforce(shape)
        if method == Method.CLOSED.value:
            return self.formulas.closed_distribution(shape)
        if method == Method.RECURRENCE.value:
            counts = tuple(self.gamma_recursive(shape, i) for i in range(shape.max_rank + 1))
            tag = "recurrence" if shape.s >= 2 else "recurrence base"
            return RankDistribution(shape, counts, Method.RECURRENCE.value, (tag,) * len(counts))
        if method != "auto":
            raise ShapeError(f"unknown method {method!r}")

        counts: List[int] = []
        provenance: List[str] = []
        used = set()
        for i in range(shape.max_rank + 1):
            value, source, path = self._ladder(shape, i)
            counts.append(value)
            provenance.append(source)
            used.add(path)
        tag = used.pop() if len(used) == 1 else Method.MIXED.value
        return RankDistribution(shape, tuple(counts), tag, tuple(provenance))

    def mixed_distribution(self, ms: MixedShape, method: str = "auto", workers: Optional[int] = None) -> RankDistribution:
        """
        Gamma of n free rows over [1+m, 1+m+l] x k. The default combines the
        enumerated double stack with the a_j^(n) coefficients; brute enumerates
        the whole mixed stack.
        """
        method = getattr(method, "value", method)
        workers = self.workers if workers is None else workers
        if method == Method.BRUTE.value:
            return gamma_bruteforce_mixed(ms, self.bit_budget, workers)
        if method not in ("auto", Method.CLOSED.value):
            raise UnsupportedError(f"method {method!r} is not available for mixed stacks", (ms.n, ms.m, ms.l, ms.k))
        double = ms.double
        base = gamma_bruteforce_double(double.rows1, double.rows2, ms.k, self.bit_budget, workers)
        counts = tuple(gamma_mixed_from_doubles(ms, i, base) for i in range(ms.max_rank + 1))
        return RankDistribution(ms, counts, Method.MIXED.value, ("double stack",) * len(counts))

    def _ladder(self, shape: TripleShape, i: int) -> Tuple[int, str, str]:
        try:
            result = self.formulas.closed_form(shape, i)
            return result.value, result.source, Method.CLOSED.value
        except UnsupportedError:
            logger.debug(f"Gamma_{i} of {shape.as_dict()}: no closed form, trying recurrence")
        if shape.s >= 2:
            try:
                return self.gamma_recursive(shape, i), "recurrence", Method.RECURRENCE.value
            except UnsupportedError as e:
                logger.debug(f"Recurrence stopped at {e.frontier}, trying enumeration")
        try:
            return self._bruteforce(shape)[i], "enumeration", Method.BRUTE.value
        except BudgetExceededError as e:
            raise UnsupportedError(
                f"Gamma_{i} of {list(shape.blocks)} x {shape.k}: every path failed ({e})",
                (shape.s, shape.m, shape.l, shape.k, i),
            )

    # Cache

    def clear_cache(self) -> None:
        with self._lock:
            self._memo.clear()
            self._brute.clear()
            self.hits = 0
            self.misses = 0

    def cache_info(self) -> Dict[str, int]:
        with self._lock:
            return {
                "entries": len(self._memo),
                "enumerated_shapes": len(self._brute),
                "hits": self.hits,
                "misses": self.misses,
            }


def moment_check(dist: RankDistribution) -> MomentReport:
    """
    Exact check of sum Gamma_i = 2^bits and, for triple stacks,
    sum Gamma_i 2^-i = 2^(2k+R-3) + 2^(3k-3) - 2^(2k-3) with R = 3s+2m+l.
    """
    shape = dist.shape
    total = dist.total
    expected = 1 << shape.coefficient_bits
    if not isinstance(shape, TripleShape):
        return MomentReport(total, expected, None)

    k, rows, top = shape.k, shape.total_rows, shape.max_rank
    # both sides scaled by 2^(top+3)
    lhs = sum(count << (top + 3 - i) for i, count in enumerate(dist.counts))
    rhs = (1 << (2 * k + rows + top)) + (1 << (3 * k + top)) - (1 << (2 * k + top))
    return MomentReport(total, expected, Fraction(lhs - rhs, 1 << (top + 3)))


@lru_cache()
def get_recurrence_service() -> RecurrenceService:
    """Get singleton instance of the recurrence service"""
    return RecurrenceService(get_formula_service())
