"""
Formula catalog loader

The catalog (data/formula_catalog.json) lists closed-form rank counts as
expressions in s, m, l, k, i, j together with the index range and the
k-window each case claims. Expressions are parsed once with sympy and
evaluated exactly: negative powers of two become rationals and cancel.
Corrections from the errata file are overlaid on load; the catalog text
itself keeps the printed forms.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple
import json
import logging

import sympy

from app.config import settings
from app.core.exceptions import ConsistencyError, ShapeError

logger = logging.getLogger(__name__)

SYMBOLS = {name: sympy.Symbol(name, integer=True) for name in ("s", "m", "l", "k", "i", "j", "q")}
_LOCALS = dict(SYMBOLS, max=sympy.Max, min=sympy.Min)


def parse(text: str) -> sympy.Expr:
    """Parse a catalog expression (Python syntax) into a sympy expression."""
    try:
        return sympy.sympify(text, locals=_LOCALS)
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ShapeError(f"cannot parse catalog expression {text!r}: {e}")


def evaluate(expr: sympy.Expr, env: Dict[str, int]) -> sympy.Rational:
    value = expr.subs({SYMBOLS[name]: sympy.Integer(v) for name, v in env.items() if name in SYMBOLS})
    if not value.is_Rational:
        raise ConsistencyError(f"{expr} did not reduce to a number under {env}")
    return value


def evaluate_int(expr: sympy.Expr, env: Dict[str, int]) -> int:
    value = evaluate(expr, env)
    if not value.is_Integer:
        raise ConsistencyError(f"{expr} is not integral under {env}: {value}")
    return int(value)


Window = Dict[str, Tuple[int, Optional[int]]]


def _when_matches(when: Window, env: Dict[str, int]) -> bool:
    for name, (lo, hi) in when.items():
        value = env[name]
        if value < lo or (hi is not None and value > hi):
            return False
    return True


@dataclass(frozen=True)
class FormulaCase:
    """One closed-form case: Gamma_i for i = offset + j, j in [j_lo, j_hi], k in the window."""

    id: str
    family: str
    when: Window
    offset: sympy.Expr
    j_range: Tuple[sympy.Expr, sympy.Expr]
    k_range: Tuple[sympy.Expr, Optional[sympy.Expr]]
    value: sympy.Expr
    text: str = field(compare=False)
    corrected_by: Optional[str] = field(default=None, compare=False)

    def locate(self, s: int, m: int, l: int, k: int, i: int) -> Optional[int]:
        """The j at which this case claims Gamma_i for the shape, or None."""
        env = {"s": s, "m": m, "l": l, "k": k}
        if not _when_matches(self.when, env):
            return None
        if i > min(k, 3 * s + 2 * m + l):
            return None
        j = i - evaluate_int(self.offset, env)
        lo, hi = (evaluate_int(bound, env) for bound in self.j_range)
        if j < lo or j > hi:
            return None
        env.update(i=i, j=j)
        if k < evaluate_int(self.k_range[0], env):
            return None
        if self.k_range[1] is not None and k > evaluate_int(self.k_range[1], env):
            return None
        return j

    def evaluate(self, s: int, m: int, l: int, k: int, i: int, j: int) -> sympy.Rational:
        return evaluate(self.value, {"s": s, "m": m, "l": l, "k": k, "i": i, "j": j})

    def points(self, s: int, m: int, l: int, k: int) -> Iterator[Tuple[int, int]]:
        """Every (i, j) this case claims at the given shape."""
        env = {"s": s, "m": m, "l": l, "k": k}
        if not _when_matches(self.when, env):
            return
        lo, hi = (evaluate_int(bound, env) for bound in self.j_range)
        offset = evaluate_int(self.offset, env)
        for j in range(lo, hi + 1):
            if self.locate(s, m, l, k, offset + j) == j:
                yield offset + j, j


@dataclass(frozen=True)
class ReductionCase:
    """Gamma_i(shape, k) = 2^factor * Gamma_i'(target shape, k')."""

    id: str
    family: str
    when: Window
    offset: sympy.Expr
    j_range: Tuple[sympy.Expr, sympy.Expr]
    k_range: Tuple[sympy.Expr, Optional[sympy.Expr]]
    target: Dict[str, sympy.Expr]
    log2_factor: sympy.Expr

    locate = FormulaCase.locate

    def apply(self, s: int, m: int, l: int, k: int, i: int, j: int) -> Tuple[Dict[str, int], int]:
        env = {"s": s, "m": m, "l": l, "k": k, "i": i, "j": j}
        target = {name: evaluate_int(expr, env) for name, expr in self.target.items()}
        return target, evaluate_int(self.log2_factor, env)


def _window(raw: dict) -> Window:
    return {name: (bounds[0], bounds[1]) for name, bounds in raw.items()}


def _range(raw: list) -> Tuple[sympy.Expr, Optional[sympy.Expr]]:
    return parse(raw[0]), None if raw[1] is None else parse(raw[1])


@dataclass
class FormulaCatalog:
    cases: List[FormulaCase]
    reductions: List[ReductionCase]
    withdrawn: Dict[str, str] = field(default_factory=dict)
    version: int = 1

    def by_id(self, case_id: str) -> FormulaCase:
        for case in self.cases:
            if case.id == case_id:
                return case
        raise KeyError(case_id)

    def matches(self, s: int, m: int, l: int, k: int, i: int) -> List[Tuple[FormulaCase, int]]:
        """All cases claiming Gamma_i at the shape, in catalog order."""
        found = []
        for case in self.cases:
            j = case.locate(s, m, l, k, i)
            if j is not None:
                found.append((case, j))
        return found

    def reductions_for(self, s: int, m: int, l: int, k: int, i: int) -> List[Tuple[ReductionCase, int]]:
        found = []
        for case in self.reductions:
            j = case.locate(s, m, l, k, i)
            if j is not None:
                found.append((case, j))
        return found


def _apply_errata(raw_cases: List[dict], errata: List[dict]) -> Tuple[List[dict], Dict[str, str]]:
    """Overlay corrections: replace a case's value or window, or withdraw it."""
    by_id = {case["id"]: dict(case) for case in raw_cases}
    withdrawn = {}
    for record in errata:
        correction = record.get("correction")
        if not correction:
            continue
        case = by_id.get(correction.get("case"))
        if case is None:
            continue
        action = correction["action"]
        if action == "withdraw":
            withdrawn[case["id"]] = record["id"]
            del by_id[case["id"]]
            continue
        for key in ("value", "k", "j", "when", "offset"):
            if key in correction:
                case[key] = correction[key]
        case["corrected_by"] = record["id"]
    ordered = [by_id[case["id"]] for case in raw_cases if case["id"] in by_id]
    return ordered, withdrawn


def load_catalog(path: Optional[Path] = None, errata: Optional[List[dict]] = None) -> FormulaCatalog:
    path = path or settings.catalog_path
    with open(path, encoding="utf-8") as handle:
        raw = json.load(handle)

    raw_cases, withdrawn = _apply_errata(raw["cases"], errata or [])
    cases = [
        FormulaCase(
            id=case["id"],
            family=case["family"],
            when=_window(case["when"]),
            offset=parse(case["offset"]),
            j_range=(parse(case["j"][0]), parse(case["j"][1])),
            k_range=_range(case["k"]),
            value=parse(case["value"]),
            text=case["value"],
            corrected_by=case.get("corrected_by"),
        )
        for case in raw_cases
    ]
    reductions = [
        ReductionCase(
            id=case["id"],
            family=case["family"],
            when=_window(case["when"]),
            offset=parse(case["offset"]),
            j_range=(parse(case["j"][0]), parse(case["j"][1])),
            k_range=_range(case["k"]),
            target={name: parse(expr) for name, expr in case["target"].items()},
            log2_factor=parse(case["log2_factor"]),
        )
        for case in raw.get("reductions", [])
    ]
    logger.info(
        f"Loaded {len(cases)} formula cases and {len(reductions)} reductions from {path} "
        f"({len(withdrawn)} withdrawn by errata)"
    )
    return FormulaCatalog(cases, reductions, withdrawn, raw.get("version", 1))


def load_errata(path: Optional[Path] = None) -> List[dict]:
    path = path or settings.errata_path
    if not Path(path).exists():
        logger.warning(f"Errata file not found: {path}")
        return []
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)["records"]


@lru_cache()
def get_catalog() -> FormulaCatalog:
    """Catalog with the shipped errata applied (cached)."""
    return load_catalog(errata=load_errata())
