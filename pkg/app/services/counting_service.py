"""
Exponential sums and solution counts

The additive character E reads the parity of the T^-1 coefficient of a
Laurent series. For t = sum alpha_i T^-i and a polynomial P = sum p_j T^j the
T^-1 coefficient of tP is sum p_j alpha_(j+1); with alpha_(j+1) stored at
bit j this is the parity of P & alpha. The character sum over all unknowns
of bounded degree equals 2^(unknown bits - rank), so integrating its q-th
power over the coefficient space counts the solutions of the q-fold system.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple
import logging

import sympy

from app.config import settings
from app.core import gf2x
from app.core.catalog import SYMBOLS
from app.core.enumeration import RankDistribution
from app.core.exceptions import BudgetExceededError, ConsistencyError, ShapeError, UnsupportedError
from app.core.f2core import (
    CoefficientTriple,
    MixedShape,
    TripleShape,
    bits_to_int,
    persymmetric_rows,
    rank_of_rows,
)
from app.services.recurrence_service import RecurrenceService, get_recurrence_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MixedPoint:
    """n free rows (k bits each) and the two persymmetric coefficient words."""

    rows: Tuple[int, ...]
    t: int
    eta: int

    def matrix_rows(self, ms: MixedShape) -> Tuple[int, ...]:
        return (
            tuple(self.rows)
            + persymmetric_rows(self.t, 1 + ms.m, ms.k)
            + persymmetric_rows(self.eta, 1 + ms.m + ms.l, ms.k)
        )


def factor_pow2(n: int) -> Tuple[int, int]:
    """(c, e) with n = c * 2^e and c odd; (0, 0) for zero."""
    if n == 0:
        return 0, 0
    e = (abs(n) & -abs(n)).bit_length() - 1
    return n >> e, e


def format_pow2(n: int) -> str:
    c, e = factor_pow2(n)
    return str(c) if e == 0 else f"{c}·2^{e}"


def _shift(value: int, exponent: int, what: str) -> int:
    if exponent >= 0:
        return value << exponent
    quotient, remainder = divmod(value, 1 << -exponent)
    if remainder:
        raise ConsistencyError(f"{what} is not an integer; the distribution is inconsistent")
    return quotient


def _require(bits: int, bit_budget: Optional[int], what: str) -> None:
    budget = settings.BIT_BUDGET if bit_budget is None else bit_budget
    if bits > budget:
        raise BudgetExceededError(bits, budget, what)


def _character_sum(y: int, coeffs: int, cap: int) -> int:
    """sum over deg Z < cap of E(coeffs * Y * Z)."""
    total = 0
    for z in range(1 << cap):
        total += -1 if gf2x.parity(gf2x.mul(y, z) & coeffs) else 1
    return total


def _free_row_sum(y: int, row: int) -> int:
    """sum over a constant V in {0, 1} of E(theta * Y * V)."""
    return 0 if gf2x.parity(y & row) else 2


def _triple_sum(alpha: int, beta: int, gamma: int, shape: TripleShape) -> int:
    caps = shape.blocks
    total = 0
    for y in range(1 << shape.k):
        product = _character_sum(y, alpha, caps[0])
        if product:
            product *= _character_sum(y, beta, caps[1])
        if product:
            product *= _character_sum(y, gamma, caps[2])
        total += product
    return total


def exp_sum_direct(point: CoefficientTriple, shape: TripleShape, bit_budget: Optional[int] = None) -> int:
    """
    g = sum over (Y, Z, U, V) with deg Y < k, deg Z < s, deg U < s+m,
    deg V < s+m+l of E(tYZ) E(eta YU) E(xi YV), by explicit summation.
    """
    if not point.matches(shape):
        raise ShapeError(f"point does not match the coset lengths {shape.coset_lengths}")
    _require(shape.k + shape.total_rows, bit_budget, "character sum")
    value = _triple_sum(
        bits_to_int(point.alpha), bits_to_int(point.beta), bits_to_int(point.gamma), shape
    )
    if value <= 0 or value & (value - 1):
        raise ConsistencyError(f"character sum {value} is not a power of two")
    return value


def exp_sum_mixed(point: MixedPoint, ms: MixedShape, bit_budget: Optional[int] = None) -> int:
    """
    Character sum of the mixed system: deg Y < k, deg Z <= m, deg U <= m+l and
    n constants, one per free row. Equals 2^(k+2m+l+n+2-rank).
    """
    if len(point.rows) != ms.n or any(row >> ms.k for row in point.rows):
        raise ShapeError(f"expected {ms.n} free rows of {ms.k} bits")
    if point.t >> (ms.k + ms.m) or point.eta >> (ms.k + ms.m + ms.l):
        raise ShapeError("persymmetric coefficients exceed their coset lengths")
    _require(ms.k + ms.total_rows, bit_budget, "mixed character sum")
    total = 0
    for y in range(1 << ms.k):
        product = 1
        for row in point.rows:
            product *= _free_row_sum(y, row)
            if not product:
                break
        if product:
            product *= _character_sum(y, point.t, 1 + ms.m)
        if product:
            product *= _character_sum(y, point.eta, 1 + ms.m + ms.l)
        total += product
    return total


def exp_sum_expected(point: CoefficientTriple, shape: TripleShape) -> int:
    """2^(R+k-rank) from the stacked matrix of the point."""
    r1, r2, r3 = shape.blocks
    rows = (
        persymmetric_rows(bits_to_int(point.alpha), r1, shape.k)
        + persymmetric_rows(bits_to_int(point.beta), r2, shape.k)
        + persymmetric_rows(bits_to_int(point.gamma), r3, shape.k)
    )
    return 1 << (shape.total_rows + shape.k - rank_of_rows(rows))


def _weighted_sum(dist: RankDistribution, q: int) -> Tuple[int, int]:
    """(sum Gamma_i 2^((I-i)q), I) with I the top rank index."""
    top = len(dist) - 1
    return sum(count << ((top - i) * q) for i, count in enumerate(dist.counts)), top


class CountingService:
    """Solution counts from rank distributions"""

    def __init__(self, recurrence: RecurrenceService):
        self.recurrence = recurrence

    @staticmethod
    def _check_triple(dist: RankDistribution, k: int, s: int, m: int, l: int) -> None:
        expected = TripleShape(s, m, l, k)
        if dist.shape != expected:
            raise ShapeError(f"distribution is for {dist.shape}, expected {expected}")

    def r_q(self, q: int, k: int, s: int, m: int, dist: RankDistribution) -> int:
        """R_q(k, s, m): solutions of the q-fold system with blocks [s, s+m, s+m]."""
        return self.r_q_general(q, k, s, m, 0, dist)

    def r_q_general(
        self,
        q: int,
        k: int,
        s: int,
        m: int,
        l: int,
        dist: RankDistribution,
        allow_extrapolated: bool = False,
    ) -> int:
        """
        2^((k+R)q - (3k+R-3)) * sum Gamma_i 2^(-iq), R = 3s+2m+l.

        The l > 0 form is only returned with allow_extrapolated.
        """
        if q < 1:
            raise ShapeError(f"q must be positive, got {q}")
        if l > 0 and not allow_extrapolated:
            raise UnsupportedError("the solution count for l > 0 is extrapolated; pass allow_extrapolated", (s, m, l, k))
        self._check_triple(dist, k, s, m, l)
        rows = 3 * s + 2 * m + l
        weighted, top = _weighted_sum(dist, q)
        exponent = (k + rows) * q - (3 * k + rows - 3) - top * q
        return _shift(weighted, exponent, f"R_{q} for {dist.shape}")

    def r_q_mixed(
        self,
        q: int,
        n: int,
        m: int,
        l: int,
        k: int,
        dist: RankDistribution,
        corrected: bool = False,
    ) -> int:
        """
        Solution count of the mixed system from Gamma of [(n), 1+m, 1+m+l] x k.

        The default reproduces the published prefactor 2^(q(k+2m+l+n+4) - (2m+l+k(n+2)));
        corrected=True uses the exponent k+2m+l+n+2 that matches the degree caps
        and agrees with direct enumeration.
        """
        if q < 1:
            raise ShapeError(f"q must be positive, got {q}")
        ms = MixedShape(n, m, l, k)
        if dist.shape != ms:
            raise ShapeError(f"distribution is for {dist.shape}, expected {ms}")
        offset = 2 if corrected else 4
        weighted, top = _weighted_sum(dist, q)
        exponent = q * (k + 2 * m + l + n + offset) - (2 * m + l + k * (n + 2)) - top * q
        return _shift(weighted, exponent, f"mixed R_{q} for {ms}")

    def r_q_symbolic(self, k: int, s: int, m: int, l: int, dist: RankDistribution) -> sympy.Expr:
        """R_q as an expression in q."""
        self._check_triple(dist, k, s, m, l)
        q = SYMBOLS["q"]
        rows = 3 * s + 2 * m + l
        series = sum(
            (sympy.Integer(count) * sympy.Integer(2) ** (-i * q) for i, count in enumerate(dist.counts)),
            sympy.Integer(0),
        )
        return sympy.Integer(2) ** ((k + rows) * q - (3 * k + rows - 3)) * series

    def count_solutions(
        self,
        q: int,
        k: int,
        m: int,
        s: Optional[int] = None,
        l: int = 0,
        n: Optional[int] = None,
        method: str = "auto",
        corrected: bool = False,
        allow_extrapolated: bool = False,
    ) -> Tuple[int, RankDistribution]:
        """
        Solution count of the triple system (s given) or of the mixed system
        (n given), together with the distribution it was computed from.
        """
        if (s is None) == (n is None):
            raise ShapeError("give exactly one of s (triple system) or n (mixed system)")
        if n is not None:
            dist = self.recurrence.mixed_distribution(MixedShape(n, m, l, k), method)
            return self.r_q_mixed(q, n, m, l, k, dist, corrected), dist
        dist = self.recurrence.distribution(TripleShape(s, m, l, k), method)
        return self.r_q_general(q, k, s, m, l, dist, allow_extrapolated), dist

    def invertible_fraction(self, s: int, m: int, dist: Optional[RankDistribution] = None) -> Fraction:
        """Share of square stacks [s, s+m, s+m] x (3s+2m) that are invertible."""
        size = 3 * s + 2 * m
        shape = TripleShape(s, m, 0, size)
        if dist is None:
            top = self.recurrence.distribution(shape)[size]
        else:
            if dist.shape != shape:
                raise ShapeError(f"distribution is for {dist.shape}, expected {shape}")
            top = dist[size]
        return Fraction(top, 1 << shape.coefficient_bits)

    def exp_sum_total(self, shape: TripleShape, q: int, bit_budget: Optional[int] = None) -> int:
        """sum over every point of g(p)^q, divided by the number of points."""
        if q < 1:
            raise ShapeError(f"q must be positive, got {q}")
        bits = shape.coefficient_bits
        _require(bits + shape.k, bit_budget, "global character sum")
        la, lb, lg = shape.coset_lengths
        total = 0
        for alpha in range(1 << la):
            for beta in range(1 << lb):
                for gamma in range(1 << lg):
                    total += _triple_sum(alpha, beta, gamma, shape) ** q
        logger.info(f"Summed g^{q} over 2^{bits} points of {shape.as_dict()}")
        return _shift(total, -bits, f"global sum for {shape.as_dict()}")


@lru_cache()
def get_counting_service() -> CountingService:
    """Get singleton instance of the counting service"""
    return CountingService(get_recurrence_service())
