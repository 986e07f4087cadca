"""
Closed-form rank counts

Evaluators for the closed forms of Gamma: the universal low-rank and
square-width counts, the unstructured (Landsberg) count, the a_j^(n)
coefficients that express mixed stacks through double stacks, and a
dispatcher over the formula catalog that honours every case's validity
window and the shipped errata. Nothing here extrapolates: a point outside
all windows raises UnsupportedError and the caller falls back.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Set, Tuple
import logging
import threading

import sympy

from app.core.catalog import SYMBOLS, FormulaCatalog, FormulaCase, evaluate_int, get_catalog
from app.core.enumeration import Method, RankDistribution
from app.core.exceptions import ConsistencyError, ShapeError, UnsupportedError
from app.core.f2core import DoubleShape, MixedShape, TripleShape

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormulaResult:
    """A closed-form value together with the case that produced it."""

    value: int
    source: str
    validity: Dict = field(default_factory=dict, compare=False)
    corrected_by: Optional[str] = None

    def __post_init__(self):
        if self.value < 0:
            raise ConsistencyError(f"{self.source} produced a negative count {self.value}")


@dataclass(frozen=True)
class ReductionStep:
    """Gamma_i(shape) = 2^log2_factor * Gamma_target_i(target)."""

    case_id: str
    target: TripleShape
    target_i: int
    log2_factor: int


def _shift_exact(value: int, shift: int, what: str) -> int:
    """value * 2^shift for a possibly negative shift, refusing to round."""
    if shift >= 0:
        return value << shift
    quotient, remainder = divmod(value, 1 << -shift)
    if remainder:
        raise ConsistencyError(f"{what} is not integral")
    return quotient


def gamma_low(i: int) -> int:
    """
    Universal low-rank count 105*2^(4i-6) - 21*2^(3i-5).

    Equals Gamma_i of every triple stack with 1 <= i <= s-1 and k >= i+1;
    gamma_low(0) is 1.
    """
    if i < 0:
        raise ShapeError(f"rank index must be nonnegative, got {i}")
    if i == 0:
        return 1
    return _shift_exact(105 * (1 << (4 * i)) - 21 * (1 << (3 * i + 1)), -6, f"gamma_low({i})")


def gamma_square(s: int, m: int, l: int, i: int) -> int:
    """Gamma_i of [s, s+m, s+m+l] x i for 1 <= i <= s+1."""
    if i < 1 or i > s + 1:
        raise UnsupportedError(f"square width count needs 1 <= i <= s+1, got i={i}", (s, m, l, i, i))
    rows = 3 * s + 2 * m + l
    scaled = (1 << (rows + 3 * i + 3)) - 7 * (1 << (4 * i)) + 3 * (1 << (3 * i + 1))
    return _shift_exact(scaled, -6, f"gamma_square({s}, {m}, {l}, {i})")


def count_rank_unstructured(rows: int, cols: int, i: int) -> int:
    """Number of rows x cols matrices over F2 of rank i."""
    if i < 0 or i > min(rows, cols):
        return 0
    numerator = 1
    denominator = 1
    for t in range(i):
        numerator *= ((1 << rows) - (1 << t)) * ((1 << cols) - (1 << t))
        denominator *= (1 << i) - (1 << t)
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise ConsistencyError(f"rank count {rows}x{cols} rank {i} is not integral")
    return quotient


def gaussian_binomial(n: int, i: int) -> int:
    """Number of i-dimensional subspaces of F2^n."""
    if i < 0 or i > n:
        return 0
    numerator = 1
    denominator = 1
    for t in range(i):
        numerator *= (1 << n) - (1 << t)
        denominator *= (1 << i) - (1 << t)
    return numerator // denominator


@lru_cache(maxsize=None)
def _a_row(n: int) -> Tuple[int, ...]:
    if n == 0:
        return (1,)
    previous = _a_row(n - 1)
    row = [1]
    for j in range(1, n):
        row.append((previous[j] << j) + previous[j - 1])
    row.append(1)
    return tuple(row)


def a_coeff(n: int, j: int) -> int:
    """a_j^(n) from a_j^(n) = 2^j a_j^(n-1) + a_(j-1)^(n-1), a_0 = a_n = 1."""
    if n < 0 or j < 0 or j > n:
        raise ShapeError(f"a_j^(n) needs 0 <= j <= n, got n={n} j={j}")
    return _a_row(n)[j]


def a_coeff_explicit(n: int, j: int) -> int:
    """a_j^(n) from the alternating closed form, independent of the recurrence."""
    if n < 0 or j < 0 or j > n:
        raise ShapeError(f"a_j^(n) needs 0 <= j <= n, got n={n} j={j}")
    sign = -1 if j % 2 else 1
    total = sign * (1 << (j * n - j * (j - 1) // 2))
    for t in range(j):
        term = gaussian_binomial(n + 1, j - t) << (t * (n - j) + t * (t + 1) // 2)
        total += -term if t % 2 else term
    return total


def a_combination(n: int, i: int) -> int:
    """
    2^(2n-2i+4) a_(i-2) + 3*2^(n-i+1) a_(i-1) + a_i with out-of-range a_j read as 0.

    Equals gaussian_binomial(n + 2, i) for 0 <= i <= n + 2.
    """
    if i < 0 or i > n + 2:
        raise ShapeError(f"combination index must lie in 0..{n + 2}, got {i}")
    total = 0
    if 0 <= i - 2 <= n:
        total += a_coeff(n, i - 2) << (2 * n - 2 * i + 4)
    if 0 <= i - 1 <= n:
        total += 3 * a_coeff(n, i - 1) << (n - i + 1)
    if i <= n:
        total += a_coeff(n, i)
    return total


def gamma_mixed_from_doubles(ms: MixedShape, i: int, double_dist: RankDistribution) -> int:
    """Gamma_i of n free rows over the double stack [1+m, 1+m+l] x k."""
    if double_dist.shape != ms.double:
        raise ShapeError(f"expected the distribution of {ms.double}, got {double_dist.shape}")
    if i < 0 or i > ms.max_rank:
        return 0
    k = ms.k
    total = 0
    for j in range(min(ms.n, i) + 1):
        base = double_dist[i - j]
        if not base:
            continue
        product = 1
        for t in range(1, j + 1):
            product *= (1 << k) - (1 << (i - t))
        total += (a_coeff(ms.n, j) * product * base) << ((ms.n - j) * (i - j))
    return total


def gamma_append_row(double_dist: RankDistribution, k: int, i: int) -> int:
    """Gamma_i of [s, s+m, 1] x k from the double distribution of [s, s+m] x k."""
    shape = double_dist.shape
    if not isinstance(shape, DoubleShape) or shape.k != k:
        raise ShapeError(f"expected a double distribution of width {k}, got {shape}")
    if i < 0:
        raise UnsupportedError(f"negative rank index {i}", (shape.rows1, shape.rows2, 1, k, i))
    if i == 0:
        return 1
    if i > min(k, shape.total_rows + 1):
        return 0
    return ((1 << k) - (1 << (i - 1))) * double_dist[i - 1] + (double_dist[i] << i)


class FormulaService:
    """Dispatch over the closed-form catalog"""

    FAMILIES = ("any", "sss", "ss1", "ssm", "s1")

    def __init__(self, catalog: FormulaCatalog):
        self.catalog = catalog
        self._cache: Dict[Tuple, FormulaResult] = {}
        self._lock = threading.Lock()
        self._local = threading.local()

    @property
    def _active(self) -> Set[Tuple]:
        """Points whose reduction is in progress on the calling thread."""
        active = getattr(self._local, "active", None)
        if active is None:
            active = self._local.active = set()
        return active

    # Single values

    def closed_form(
        self,
        shape: TripleShape,
        i: int,
        families: Optional[Sequence[str]] = None,
    ) -> FormulaResult:
        """
        Gamma_i of the shape from the first catalog case whose window holds,
        then from a reduction onto a smaller closed form.

        Raises UnsupportedError when no case or reduction covers the point.
        """
        if i < 0 or i > shape.max_rank:
            return FormulaResult(0, "support", self._validity(shape, i, None))
        key = (shape, i, tuple(families) if families else None)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached

        result = self._direct(shape, i, families)
        if result is None:
            result = self._reduced(shape, i, families)
        if result is None:
            raise UnsupportedError(
                f"no closed form for Gamma_{i} of {list(shape.blocks)} x {shape.k}",
                (shape.s, shape.m, shape.l, shape.k, i),
            )
        with self._lock:
            return self._cache.setdefault(key, result)

    def overlaps(self, shape: TripleShape, i: int) -> List[FormulaResult]:
        """Every catalog case claiming the point, evaluated."""
        return [
            self._evaluate(case, shape, i, j)
            for case, j in self.catalog.matches(shape.s, shape.m, shape.l, shape.k, i)
        ]

    def gamma_sss(self, s: int, k: int, i: int) -> FormulaResult:
        return self.closed_form(TripleShape(s, 0, 0, k), i, ("any", "sss"))

    def gamma_ssm(self, s: int, m: int, k: int, i: int) -> FormulaResult:
        if m == 0:
            return self.gamma_sss(s, k, i)
        family = "ss1" if m == 1 else "ssm"
        return self.closed_form(TripleShape(s, m, 0, k), i, ("any", family))

    def gamma_s1(self, m: int, l: int, k: int, i: int) -> FormulaResult:
        return self.closed_form(TripleShape(1, m, l, k), i, ("any", "s1"))

    # Reductions

    def reduction_map(self, shape: TripleShape, i: int) -> Optional[ReductionStep]:
        """
        First reduction window holding the point, or None. A window at its
        lowest shift maps the point onto itself with factor 1.
        """
        steps = self._reduction_steps(shape, i, None, keep_identity=True)
        return steps[0] if steps else None

    def apply_reduction(self, shape: TripleShape, i: int) -> FormulaResult:
        result = self._reduced(shape, i, None)
        if result is None:
            raise UnsupportedError(
                f"no reduction applies to Gamma_{i} of {list(shape.blocks)} x {shape.k}",
                (shape.s, shape.m, shape.l, shape.k, i),
            )
        return result

    # Whole distributions

    def closed_distribution(self, shape: TripleShape) -> RankDistribution:
        results = [self.closed_form(shape, i) for i in range(shape.max_rank + 1)]
        return RankDistribution(
            shape,
            tuple(result.value for result in results),
            Method.CLOSED.value,
            tuple(result.source for result in results),
        )

    def symbolic_gamma(self, s: int, m: int, l: int, i: int) -> Tuple[sympy.Expr, int, str]:
        """
        Gamma_i of [s, s+m, s+m+l] x k as an expression in k.

        Returns (expression, k_min, source); the expression is valid for every
        k >= k_min. Only cases with an open k-window qualify.
        """
        k = SYMBOLS["k"]
        rows = 3 * s + 2 * m + l
        if i < 0 or i > rows:
            return sympy.Integer(0), 1, "support"
        probe = rows + 4
        for case, j in self.catalog.matches(s, m, l, probe, i):
            if case.k_range[1] is not None:
                continue
            env = {"s": s, "m": m, "l": l, "i": i, "j": j}
            expr = case.value.subs({SYMBOLS[name]: value for name, value in env.items()})
            k_min = max(i, 1, evaluate_int(case.k_range[0], dict(env, k=probe)))
            return sympy.expand(expr), k_min, case.id

        for case, j in self.catalog.reductions_for(s, m, l, probe, i):
            if case.k_range[1] is not None:
                continue
            env = {"s": s, "m": m, "l": l, "i": i, "j": j}
            bind = {SYMBOLS[name]: value for name, value in env.items()}
            target = {name: expr.subs(bind) for name, expr in case.target.items()}
            lowered = int(k - target["k"])
            ts, tm, tl, ti = (int(target[name]) for name in ("s", "m", "l", "i"))
            if (ts, tm, tl, ti) == (s, m, l, i) and lowered == 0:
                continue
            inner, inner_min, inner_source = self.symbolic_gamma(ts, tm, tl, ti)
            factor = int(case.log2_factor.subs(bind))
            k_min = max(i, evaluate_int(case.k_range[0], dict(env, k=probe)), inner_min + lowered)
            expr = sympy.expand(sympy.Integer(2) ** factor * inner.subs(k, k - lowered))
            return expr, k_min, f"{case.id} -> {inner_source}"

        raise UnsupportedError(f"no open-window closed form for Gamma_{i}", (s, m, l, "k", i))

    # Internals

    @staticmethod
    def _validity(shape: TripleShape, i: int, case: Optional[FormulaCase], j: Optional[int] = None) -> Dict:
        validity = {"shape": shape.as_dict(), "i": i}
        if case is not None:
            env = {"s": shape.s, "m": shape.m, "l": shape.l, "k": shape.k, "i": i, "j": j}
            low, high = case.k_range
            validity["k_window"] = [
                evaluate_int(low, env),
                None if high is None else evaluate_int(high, env),
            ]
        return validity

    def _evaluate(self, case: FormulaCase, shape: TripleShape, i: int, j: int) -> FormulaResult:
        value = case.evaluate(shape.s, shape.m, shape.l, shape.k, i, j)
        if not value.is_Integer:
            raise ConsistencyError(f"{case.id} is not integral at {shape.as_dict()} i={i}: {value}")
        return FormulaResult(int(value), case.id, self._validity(shape, i, case, j), case.corrected_by)

    def _direct(self, shape: TripleShape, i: int, families: Optional[Sequence[str]]) -> Optional[FormulaResult]:
        for case, j in self.catalog.matches(shape.s, shape.m, shape.l, shape.k, i):
            if families is None or case.family in families:
                return self._evaluate(case, shape, i, j)
        return None

    def _reduction_steps(
        self, shape: TripleShape, i: int, families: Optional[Sequence[str]], keep_identity: bool = False
    ) -> List[ReductionStep]:
        steps = []
        for case, j in self.catalog.reductions_for(shape.s, shape.m, shape.l, shape.k, i):
            if families is not None and case.family not in families:
                continue
            values, log2_factor = case.apply(shape.s, shape.m, shape.l, shape.k, i, j)
            try:
                target = TripleShape(values["s"], values["m"], values["l"], values["k"])
            except ShapeError:
                continue
            target_i = values["i"]
            if target_i > target.max_rank:
                continue
            if target == shape and target_i == i and not keep_identity:
                continue
            steps.append(ReductionStep(case.id, target, target_i, log2_factor))
        return steps

    def _reduced(self, shape: TripleShape, i: int, families: Optional[Sequence[str]]) -> Optional[FormulaResult]:
        key = (shape, i)
        if key in self._active:
            return None
        self._active.add(key)
        try:
            for step in self._reduction_steps(shape, i, families):
                try:
                    inner = self.closed_form(step.target, step.target_i)
                except UnsupportedError:
                    continue
                logger.debug(f"Gamma_{i} of {shape.as_dict()} reduced by {step.case_id} to {inner.source}")
                return FormulaResult(
                    inner.value << step.log2_factor,
                    f"{step.case_id} -> {inner.source}",
                    self._validity(shape, i, None),
                    inner.corrected_by,
                )
            return None
        finally:
            self._active.discard(key)


@lru_cache()
def get_formula_service() -> FormulaService:
    """Get singleton instance of the formula service"""
    return FormulaService(get_catalog())
