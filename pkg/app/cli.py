"""
Command-line front end

    python -m app.cli gamma --s 2 --k 6 --method closed
    python -m app.cli count --q 3 --k 5 --s 3 --m 0
    python -m app.cli verify --suite golden
    python -m app.cli table sss-s2-k6

Results go to stdout as JSON (default) or TSV; logs go to stderr. Exit
status is 0 on success, 1 when a verification fails and 2 for usage errors
and requests no method can serve.
"""

from typing import Dict, List, Optional
import argparse
import json
import logging
import sys

import pandas as pd

from app.config import settings
from app.core.exceptions import ConsistencyError, HankelRankError, NotFoundError, UnsupportedError
from app.core.f2core import MixedShape, TripleShape
from app.models.shapes import CountRecord, Method, OutputFormat, OutputRecord, Suite
from app.services.counting_service import CountingService
from app.services.formula_service import get_formula_service
from app.services.recurrence_service import RecurrenceService
from app.services.table_service import TableService, get_table_service
from app.services.verification_service import VerificationService

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _emit(payload: Dict, frame: Optional[pd.DataFrame], fmt: str) -> None:
    if fmt == OutputFormat.TSV.value and frame is not None:
        sys.stdout.write(frame.to_csv(sep="\t", index=False, lineterminator="\n"))
    else:
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _distribution_frame(record: OutputRecord) -> pd.DataFrame:
    frame = pd.DataFrame({"i": range(len(record.counts)), "count": record.counts})
    if len(record.provenance) == len(record.counts):
        frame["source"] = record.provenance
    return frame


def cmd_gamma(args, counting: CountingService) -> int:
    recurrence = counting.recurrence
    if args.n is not None:
        dist = recurrence.mixed_distribution(MixedShape(args.n, args.m, args.l, args.k), args.method)
    else:
        if args.s is None:
            raise UnsupportedError("gamma needs --s (triple stack) or --n (mixed stack)")
        dist = recurrence.distribution(TripleShape(args.s, args.m, args.l, args.k), args.method)
    record = OutputRecord.from_distribution(dist)
    _emit(record.model_dump(), _distribution_frame(record), args.format)
    return EXIT_OK


def cmd_count(args, counting: CountingService) -> int:
    value, dist = counting.count_solutions(
        args.q,
        args.k,
        args.m,
        s=args.s,
        l=args.l,
        n=args.n,
        method=args.method,
        corrected=args.corrected,
        allow_extrapolated=args.allow_extrapolated,
    )
    params = {"q": args.q, "k": args.k, "m": args.m, "l": args.l}
    params.update({"s": args.s} if args.s is not None else {"n": args.n})
    record = CountRecord.build(params, dist.method, value)
    frame = pd.DataFrame([dict(params, value=record.value, factored=record.factored)])
    _emit(record.model_dump(), frame, args.format)
    return EXIT_OK


def cmd_verify(args, counting: CountingService) -> int:
    service = VerificationService(counting, get_table_service())
    report = service.run(args.suite, args.max_bits, counting.recurrence.workers)
    payload = report.as_dict()
    frame = pd.DataFrame(payload["failures"]) if payload["failures"] else None
    _emit(payload, frame, args.format)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_table(args, counting: CountingService) -> int:
    tables: TableService = get_table_service()
    if args.table_id is None:
        listing = tables.list_tables()
        _emit({"tables": listing}, pd.DataFrame(listing)[["id", "kind", "family", "title"]], args.format)
        return EXIT_OK
    record = tables.record(args.table_id, args.k)
    _emit(record, TableService.to_frame(record), args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hankelrank",
        description="Exact rank distributions of stacked persymmetric matrices over F2.",
    )
    parser.add_argument("--bit-budget", type=int, default=settings.BIT_BUDGET,
                        help="largest enumeration in coefficient bits (env BIT_BUDGET)")
    parser.add_argument("--workers", type=int, default=settings.WORKERS,
                        help="enumeration processes (env WORKERS)")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    methods = [method.value for method in Method]
    formats = [fmt.value for fmt in OutputFormat]

    gamma = sub.add_parser("gamma", help="full rank distribution of one shape")
    gamma.add_argument("--s", type=int)
    gamma.add_argument("--n", type=int, help="unstructured rows; selects the mixed stack")
    gamma.add_argument("--m", type=int, default=0)
    gamma.add_argument("--l", type=int, default=0)
    gamma.add_argument("--k", type=int, required=True)
    gamma.add_argument("--method", choices=methods, default=Method.AUTO.value)
    gamma.add_argument("--format", choices=formats, default=OutputFormat.JSON.value)
    gamma.set_defaults(handler=cmd_gamma)

    count = sub.add_parser("count", help="number of solutions of the q-fold system")
    count.add_argument("--q", type=int, required=True)
    count.add_argument("--k", type=int, required=True)
    count.add_argument("--s", type=int)
    count.add_argument("--n", type=int, help="unstructured rows; selects the mixed system")
    count.add_argument("--m", type=int, default=0)
    count.add_argument("--l", type=int, default=0)
    count.add_argument("--method", choices=methods, default=Method.AUTO.value)
    count.add_argument("--corrected", action="store_true",
                       help="mixed system: exponent matching the degree caps")
    count.add_argument("--allow-extrapolated", action="store_true",
                       help="accept l > 0 for the triple system")
    count.add_argument("--format", choices=formats, default=OutputFormat.JSON.value)
    count.set_defaults(handler=cmd_count)

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("--suite", choices=[suite.value for suite in Suite], required=True)
    verify.add_argument("--max-bits", type=int, default=None,
                        help=f"enumeration limit of the suite (default {settings.CI_BIT_BUDGET})")
    verify.add_argument("--format", choices=formats, default=OutputFormat.JSON.value)
    verify.set_defaults(handler=cmd_verify)

    table = sub.add_parser("table", help="print a worked-example table, or list them")
    table.add_argument("table_id", nargs="?")
    table.add_argument("--k", type=int, help="width for symbolic tables")
    table.add_argument("--format", choices=formats, default=OutputFormat.JSON.value)
    table.set_defaults(handler=cmd_table)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)],
    )
    recurrence = RecurrenceService(get_formula_service(), bit_budget=args.bit_budget, workers=args.workers)
    counting = CountingService(recurrence)
    try:
        return args.handler(args, counting)
    except NotFoundError as e:
        logger.error(f"{e}; known ids: {', '.join(e.known)}")
        return EXIT_USAGE
    except ConsistencyError as e:
        logger.error(f"Inconsistent result: {e}")
        return EXIT_FAILED
    except UnsupportedError as e:
        logger.error(f"Unsupported: {e}")
        return EXIT_USAGE
    except HankelRankError as e:
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
