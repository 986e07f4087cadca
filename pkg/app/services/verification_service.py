"""
Verification suites

Each suite compares independent computations of the same quantity (closed
forms, the recurrence, brute-force enumeration, direct character sums) and
collects every disagreement as a failure record. A point that no path can
reach inside the budget is reported as skipped, never as passed.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Tuple
import logging
import time

import numpy as np

from app.config import settings
from app.core.catalog import SYMBOLS
from app.core.enumeration import (
    Method,
    RankDistribution,
    gamma_bruteforce,
    gamma_bruteforce_double,
    gamma_bruteforce_mixed,
    joint_profiles,
    solution_count_bruteforce,
    solution_count_bruteforce_mixed,
)
from app.core.exceptions import BudgetExceededError, NotFoundError, UnsupportedError
from app.core.f2core import CoefficientTriple, MixedShape, TripleShape, rank_of_rows
from app.services.counting_service import (
    CountingService,
    MixedPoint,
    exp_sum_direct,
    exp_sum_expected,
    exp_sum_mixed,
    get_counting_service,
)
from app.services.formula_service import (
    a_coeff,
    a_coeff_explicit,
    a_combination,
    count_rank_unstructured,
    gamma_low,
    gamma_mixed_from_doubles,
    gaussian_binomial,
)
from app.services.recurrence_service import moment_check
from app.services.table_service import TableService, get_table_service

logger = logging.getLogger(__name__)

SUITES = ("golden", "oracle", "identities", "recurrence", "expsum", "profiles")

# l > 0 shapes (s, m, l, k) checked against enumeration by the recurrence suite
RECURRENCE_L_SHAPES = ((2, 1, 1, 4), (2, 0, 1, 4), (2, 0, 2, 3), (3, 0, 1, 3))

# (q, k, s, m, l) small enough to count solutions directly
DIRECT_COUNT_CASES = ((1, 1, 1, 0, 0), (1, 2, 1, 0, 0), (2, 2, 1, 0, 0), (2, 1, 1, 1, 0), (2, 2, 1, 0, 1))

# (q, n, m, l, k) for the mixed solution count
DIRECT_MIXED_CASES = ((1, 1, 0, 0, 2), (2, 1, 0, 0, 2), (1, 2, 0, 1, 2), (2, 0, 1, 0, 2))

EXPSUM_SHAPES = ((1, 0, 0, 3), (1, 1, 0, 3), (2, 0, 0, 3), (1, 1, 1, 4), (2, 1, 0, 4), (2, 0, 1, 3))
EXPSUM_MIXED_SHAPES = ((1, 0, 0, 3), (2, 1, 0, 3), (2, 0, 1, 3), (0, 1, 1, 4))


@dataclass
class SuiteReport:
    """Outcome of one verification suite."""

    suite: str
    checked: int = 0
    failures: List[Dict] = field(default_factory=list)
    skipped: List[Dict] = field(default_factory=list)
    errata: List[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def expect(self, what: str, got, want, **context) -> bool:
        self.checked += 1
        if got == want:
            return True
        failure = {"check": what, "got": str(got), "expected": str(want)}
        failure.update({key: value for key, value in context.items()})
        self.failures.append(failure)
        logger.warning(f"[{self.suite}] {what} mismatch: got {got}, expected {want} {context}")
        return False

    def skip(self, what: str, reason: Exception, **context) -> None:
        entry = {"check": what, "reason": str(reason)}
        entry.update(context)
        self.skipped.append(entry)

    def note_erratum(self, erratum: Optional[str]) -> None:
        if erratum and erratum not in self.errata:
            self.errata.append(erratum)

    def as_dict(self) -> Dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "skipped": len(self.skipped),
            "errata": sorted(self.errata),
            "elapsed": round(self.elapsed, 3),
        }


def triple_shapes_within(max_bits: int, min_k: int = 1) -> Iterator[TripleShape]:
    """Every triple shape with at most max_bits coefficient bits, smallest s first."""
    s = 1
    while 3 * min_k + 3 * s - 3 <= max_bits:
        m = 0
        while 3 * min_k + 3 * s + 2 * m - 3 <= max_bits:
            l = 0
            while 3 * min_k + 3 * s + 2 * m + l - 3 <= max_bits:
                k = min_k
                while 3 * k + 3 * s + 2 * m + l - 3 <= max_bits:
                    yield TripleShape(s, m, l, k)
                    k += 1
                l += 1
            m += 1
        s += 1


class VerificationService:
    """Runs the named suites against the counting services"""

    def __init__(self, counting: CountingService, tables: TableService):
        self.counting = counting
        self.recurrence = counting.recurrence
        self.formulas = counting.recurrence.formulas
        self.tables = tables

    def run(self, suite: str, max_bits: Optional[int] = None, workers: Optional[int] = None, **options) -> SuiteReport:
        runner: Optional[Callable] = getattr(self, f"suite_{suite}", None)
        if suite not in SUITES or runner is None:
            raise NotFoundError("suite", suite, SUITES)
        max_bits = settings.CI_BIT_BUDGET if max_bits is None else max_bits
        report = SuiteReport(suite)
        started = time.perf_counter()
        logger.info(f"Running suite {suite} with max_bits={max_bits}")
        runner(report, max_bits, workers, **options)
        report.elapsed = time.perf_counter() - started
        logger.info(
            f"Suite {suite}: {report.checked} checks, {len(report.failures)} failures, "
            f"{len(report.skipped)} skipped in {report.elapsed:.2f}s"
        )
        return report

    def _check_moments(self, report: SuiteReport, dist, label: str) -> None:
        moments = moment_check(dist)
        report.expect("moments", moments.passed, True, shape=label, **moments.as_dict())

    # Golden tables and counts

    def suite_golden(self, report: SuiteReport, max_bits: int, workers: Optional[int], samples: int = 3) -> None:
        for table in self.tables.tables.values():
            widths = [table.shape["k"]] if not table.symbolic else list(range(table.k_min, table.k_min + samples))
            for k in widths:
                want = table.values(k)
                try:
                    got = self._golden_values(table, k, max_bits, workers, report)
                except (UnsupportedError, BudgetExceededError) as e:
                    report.skip("golden", e, table=table.id, k=k)
                    continue
                report.expect("golden", list(got), want, table=table.id, k=k)
            for erratum in table.errata:
                report.note_erratum(erratum)

        for count in self.tables.counts.values():
            table = self.tables.get_table(count.table)
            for erratum in count.errata:
                report.note_erratum(erratum)
            try:
                dist = self._golden_distribution(table, count.params["k"], max_bits, workers)
            except (UnsupportedError, BudgetExceededError) as e:
                report.skip("count", e, count=count.id)
                continue
            p = count.params
            for q in count.q_samples or (p["q"],):
                if table.family == "mixed":
                    got = self.counting.r_q_mixed(q, p["n"], p["m"], p["l"], p["k"], dist)
                else:
                    got = self.counting.r_q_general(q, p["k"], p["s"], p["m"], p["l"], dist, allow_extrapolated=True)
                report.expect("count", got, count.expected(q), count=count.id, q=q)
            if count.q_samples:
                expr = self.counting.r_q_symbolic(p["k"], p["s"], p["m"], p["l"], dist)
                for q in count.q_samples:
                    value = expr.subs(SYMBOLS["q"], q)
                    report.expect("symbolic count", int(value), count.expected(q), count=count.id, q=q)

    def _golden_distribution(self, table, k: int, max_bits: int, workers: Optional[int]):
        shape = dict(table.shape, k=k)
        if table.family == "triple":
            return self.recurrence.distribution(TripleShape(shape["s"], shape["m"], shape["l"], k))
        if table.family == "double":
            return gamma_bruteforce_double(shape["rows1"], shape["rows2"], k, max_bits, workers)
        ms = MixedShape(shape["n"], shape["m"], shape["l"], k)
        double = ms.double
        base = gamma_bruteforce_double(double.rows1, double.rows2, k, max_bits, workers)
        counts = tuple(gamma_mixed_from_doubles(ms, i, base) for i in range(ms.max_rank + 1))
        return RankDistribution(ms, counts, Method.MIXED.value, ("double stack",))

    def _golden_values(self, table, k: int, max_bits: int, workers: Optional[int], report: SuiteReport) -> Tuple[int, ...]:
        dist = self._golden_distribution(table, k, max_bits, workers)
        self._check_moments(report, dist, f"{table.id} k={k}")
        if table.family == "mixed":
            ms = dist.shape
            if ms.coefficient_bits <= max_bits:
                direct = gamma_bruteforce_mixed(ms, max_bits, workers)
                report.expect("mixed via doubles", dist.counts, direct.counts, table=table.id, k=k)
        return dist.counts

    # Exhaustive oracle

    def suite_oracle(self, report: SuiteReport, max_bits: int, workers: Optional[int]) -> None:
        for shape in triple_shapes_within(max_bits):
            label = str(shape.as_dict())
            brute = gamma_bruteforce(shape, max_bits, workers)
            self._check_moments(report, brute, label)
            rows = shape.total_rows
            report.expect(
                "r_1",
                self.counting.r_q_general(1, shape.k, shape.s, shape.m, shape.l, brute, allow_extrapolated=True),
                (1 << rows) + (1 << shape.k) - 1,
                shape=label,
            )
            for i in range(shape.max_rank + 1):
                try:
                    result = self.formulas.closed_form(shape, i)
                except UnsupportedError as e:
                    report.skip("closed form", e, shape=label, i=i)
                else:
                    report.expect("closed form", result.value, brute[i], shape=label, i=i, source=result.source)
                    report.note_erratum(result.corrected_by)
                if shape.s >= 2:
                    try:
                        value = self.recurrence.gamma_recursive(shape, i)
                    except UnsupportedError as e:
                        report.skip("recurrence", e, shape=label, i=i)
                    else:
                        report.expect("recurrence", value, brute[i], shape=label, i=i)

    # Algebraic identities

    def suite_identities(
        self,
        report: SuiteReport,
        max_bits: int,
        workers: Optional[int],
        max_n: int = 12,
        low_rank_shapes: int = 30,
        sweep_s: int = 3,
    ) -> None:
        for n in range(max_n + 1):
            for j in range(n + 1):
                report.expect("a_coeff", a_coeff(n, j), a_coeff_explicit(n, j), n=n, j=j)
            for i in range(n + 3):
                report.expect("a_combination", a_combination(n, i), gaussian_binomial(n + 2, i), n=n, i=i)

        # unstructured rows over the trivial double stack [1, 1] x cols
        for cols in range(1, 7):
            base = gamma_bruteforce_double(1, 1, cols, max_bits, workers)
            for rows in range(0, 5):
                ms = MixedShape(rows, 0, 0, cols)
                for i in range(ms.max_rank + 1):
                    report.expect(
                        "landsberg",
                        gamma_mixed_from_doubles(ms, i, base),
                        count_rank_unstructured(rows + 2, cols, i),
                        rows=rows + 2,
                        cols=cols,
                        i=i,
                    )

        shapes = [(s, m, l) for s in range(4, 7) for m in range(5) for l in range(2)][:low_rank_shapes]
        for s, m, l in shapes:
            shape = TripleShape(s, m, l, s)
            for i in range(s):
                try:
                    value = self.recurrence.gamma_recursive(shape, i)
                except UnsupportedError as e:
                    report.skip("low rank", e, shape=str(shape.as_dict()), i=i)
                    continue
                report.expect("low rank", value, gamma_low(i), shape=str(shape.as_dict()), i=i)

        for s in range(1, sweep_s + 1):
            for m in range(4):
                for l in range(3):
                    rows = 3 * s + 2 * m + l
                    for k in range(1, rows + 3):
                        self._check_catalog_point(report, TripleShape(s, m, l, k), max_bits, workers)

        for s, m in ((1, 2), (2, 2), (1, 3)):
            try:
                fraction = self.counting.invertible_fraction(s, m)
            except UnsupportedError as e:
                report.skip("invertible fraction", e, s=s, m=m)
                continue
            report.expect("invertible fraction", fraction, Fraction(21, 64), s=s, m=m)
        for s, m in ((1, 0), (1, 1), (2, 0)):
            shape = TripleShape(s, m, 0, 3 * s + 2 * m)
            if shape.coefficient_bits > max_bits:
                report.skip("invertible fraction", BudgetExceededError(shape.coefficient_bits, max_bits), s=s, m=m)
                continue
            dist = gamma_bruteforce(shape, max_bits, workers)
            report.expect("invertible fraction", self.counting.invertible_fraction(s, m, dist), Fraction(21, 64), s=s, m=m)
        report.note_erratum("invertible-fraction-small-shapes")

    def _check_catalog_point(self, report: SuiteReport, shape: TripleShape, max_bits: int, workers: Optional[int]) -> None:
        label = str(shape.as_dict())
        brute = None
        if shape.coefficient_bits <= max_bits:
            brute = gamma_bruteforce(shape, max_bits, workers)
        for i in range(shape.max_rank + 1):
            values = self.formulas.overlaps(shape, i)
            if len(values) > 1:
                report.expect(
                    "overlap",
                    sorted({result.value for result in values}),
                    [values[0].value],
                    shape=label,
                    i=i,
                    cases=[result.source for result in values],
                )
            if self.formulas.reduction_map(shape, i) is None:
                continue
            try:
                reduced = self.formulas.apply_reduction(shape, i)
            except UnsupportedError as e:
                report.skip("reduction", e, shape=label, i=i)
                continue
            if values:
                report.expect("reduction", reduced.value, values[0].value, shape=label, i=i, source=reduced.source)
            elif brute is not None:
                report.expect("reduction", reduced.value, brute[i], shape=label, i=i, source=reduced.source)

    # Recurrence

    def suite_recurrence(
        self,
        report: SuiteReport,
        max_bits: int,
        workers: Optional[int],
        max_s: int = 4,
        max_m: int = 3,
    ) -> None:
        for s in range(2, max_s + 1):
            for m in range(max_m + 1):
                rows = 3 * s + 2 * m
                for k in range(1, rows + 3):
                    shape = TripleShape(s, m, 0, k)
                    label = str(shape.as_dict())
                    for i in range(shape.max_rank + 1):
                        try:
                            want = self.formulas.closed_form(shape, i).value
                            got = self.recurrence.gamma_recursive(shape, i)
                        except UnsupportedError as e:
                            report.skip("recurrence", e, shape=label, i=i)
                            continue
                        report.expect("recurrence vs closed", got, want, shape=label, i=i)

        for s, m, l, k in RECURRENCE_L_SHAPES:
            shape = TripleShape(s, m, l, k)
            if shape.coefficient_bits > max_bits:
                report.skip("recurrence", BudgetExceededError(shape.coefficient_bits, max_bits), shape=str(shape.as_dict()))
                continue
            brute = gamma_bruteforce(shape, max_bits, workers)
            got = self.recurrence.distribution(shape, "recurrence")
            report.expect("recurrence vs brute", got.counts, brute.counts, shape=str(shape.as_dict()))

        for s in range(2, max_s + 1):
            for m in range(max_m + 1):
                for l in range(2):
                    rows = 3 * s + 2 * m + l
                    stable = max(1, rows - 3)
                    for i in range(rows + 1):
                        try:
                            first = self.recurrence.delta_remainder(s, m, l, stable, i)
                            second = self.recurrence.delta_remainder(s, m, l, stable + 2, i)
                        except UnsupportedError as e:
                            report.skip("remainder", e, s=s, m=m, l=l, i=i)
                            continue
                        report.expect("remainder stable in k", second, first, s=s, m=m, l=l, i=i)
        report.note_erratum("remainder-square-coefficient")

    # Exponential sums and solution counts

    def suite_expsum(
        self,
        report: SuiteReport,
        max_bits: int,
        workers: Optional[int],
        points: int = 1000,
        seed: int = 0,
    ) -> None:
        rng = np.random.default_rng(seed)
        shapes = [TripleShape(*params) for params in EXPSUM_SHAPES]
        for index in range(points):
            shape = shapes[index % len(shapes)]
            words = [int(rng.integers(0, 1 << length)) for length in shape.coset_lengths]
            point = CoefficientTriple.from_ints(*words, shape)
            report.expect(
                "pointwise",
                exp_sum_direct(point, shape, max_bits),
                exp_sum_expected(point, shape),
                shape=str(shape.as_dict()),
                point=words,
            )

        mixed = [MixedShape(*params) for params in EXPSUM_MIXED_SHAPES]
        for index in range(max(1, points // 10)):
            ms = mixed[index % len(mixed)]
            rows = tuple(int(rng.integers(0, 1 << ms.k)) for _ in range(ms.n))
            point = MixedPoint(rows, int(rng.integers(0, 1 << (ms.k + ms.m))), int(rng.integers(0, 1 << (ms.k + ms.m + ms.l))))
            want = 1 << (ms.k + ms.total_rows - rank_of_rows(point.matrix_rows(ms)))
            report.expect("mixed pointwise", exp_sum_mixed(point, ms, max_bits), want, shape=str(ms.as_dict()))
        report.note_erratum("mixed-exponential-sum-exponent")

        for k in range(1, 4):
            shape = TripleShape(1, 0, 0, k)
            dist = gamma_bruteforce(shape, max_bits, workers)
            for q in range(1, 4):
                try:
                    total = self.counting.exp_sum_total(shape, q, max_bits)
                except BudgetExceededError as e:
                    report.skip("global", e, k=k, q=q)
                    continue
                report.expect("global", total, self.counting.r_q(q, k, 1, 0, dist), k=k, q=q)

        for q, k, s, m, l in DIRECT_COUNT_CASES:
            shape = TripleShape(s, m, l, k)
            dist = gamma_bruteforce(shape, max_bits, workers)
            try:
                direct = solution_count_bruteforce(q, k, s, m, l, max_bits)
            except BudgetExceededError as e:
                report.skip("solutions", e, q=q, shape=str(shape.as_dict()))
                continue
            got = self.counting.r_q_general(q, k, s, m, l, dist, allow_extrapolated=True)
            report.expect("solutions", got, direct, q=q, shape=str(shape.as_dict()))

        for q, n, m, l, k in DIRECT_MIXED_CASES:
            ms = MixedShape(n, m, l, k)
            try:
                dist = gamma_bruteforce_mixed(ms, max_bits, workers)
                direct = solution_count_bruteforce_mixed(q, ms, max_bits)
            except BudgetExceededError as e:
                report.skip("mixed solutions", e, q=q, shape=str(ms.as_dict()))
                continue
            got = self.counting.r_q_mixed(q, n, m, l, k, dist, corrected=True)
            report.expect("mixed solutions", got, direct, q=q, shape=str(ms.as_dict()))

    # Nested-stack rank profiles

    def suite_profiles(self, report: SuiteReport, max_bits: int, workers: Optional[int]) -> None:
        for shape in triple_shapes_within(min(max_bits, 18), min_k=2):
            label = str(shape.as_dict())
            profile = joint_profiles(shape, max_bits, workers)
            report.expect("profile total", profile.total, 1 << shape.coefficient_bits, shape=label)
            rows = shape.total_rows
            for j in range(min(rows - 3, shape.k - 2) + 1):
                forbidden = (j, j + 1) * 4
                report.expect("forbidden profile", profile[forbidden], 0, shape=label, j=j)
            if shape.s < 2:
                continue
            diagonal = profile.diagonal()
            for t in range(shape.max_rank + 1):
                report.expect(
                    "nested stack diagonal",
                    diagonal[t],
                    self.recurrence.sigma_closed(shape.s, shape.m, shape.l, shape.k, t),
                    shape=label,
                    t=t,
                )


@lru_cache()
def get_verification_service() -> VerificationService:
    """Get singleton instance of the verification service"""
    return VerificationService(get_counting_service(), get_table_service())
