"""Command-line entry point.

Exit status: 0 on success, 1 when a correlation fails validation, 2 on I/O or
parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import correlation as corr
from .bounds import AmsOptions, BoundReport, dimension_bound, dimension_bound_grouped, format_bound
from .ensemble import render_rows, table_rows
from .generators import FAMILIES, generate
from .quantum import MATRIX_ENTRIES, ScenarioError, born_correlation, read_scenario

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_correlation(path: str, norm_tol: float, check: bool = True):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc}") from exc
    try:
        return corr.loads(text, norm_tol=norm_tol, check=check)
    except corr.CorrelationFormatError as exc:
        raise _Fail(EXIT_IO, f"parse error: {exc}") from exc
    except corr.CorrelationError as exc:
        if check:
            raise _Fail(EXIT_INVALID, f"invalid correlation: {exc}") from exc
        raise _Fail(EXIT_IO, f"shape error: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    c = _read_correlation(args.path, args.norm_tol, check=False)
    report = corr.validate(c, args.norm_tol)
    if not args.skip_ns:
        ns = corr.check_no_signalling(c, args.ns_tol)
        report = corr.ValidationReport(
            ok=report.ok and ns.ok,
            norm_deviation=report.norm_deviation,
            clamped=report.clamped,
            negative=report.negative,
            ns_deviation=ns.ns_deviation,
            messages=ns.messages,
        )
    if args.format == "json":
        doc = {
            "ok": report.ok,
            "norm_deviation": report.norm_deviation,
            "clamped": report.clamped,
            "negative": report.negative,
            "ns_deviation": report.ns_deviation,
            "messages": list(report.messages),
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit("\n".join(report.lines()) + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_INVALID


def _bound_csv(reports: list[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "bound", "rounded", "denominator", "x", "x_prime", "ordering", "party"])
    for r in reports:
        ordering = r.strategy if r.strategy == "per-term" else ",".join(map(str, r.orderings))
        w.writerow(
            [
                "grouped" if r.grouped else "multiparty",
                format_bound(r.bound),
                "inf" if r.infinite else int(r.rounded),
                repr(r.denominator),
                r.argmin[0],
                r.argmin[1],
                ordering,
                r.target_party,
            ]
        )
    return buf.getvalue()


def cmd_bound(args) -> int:
    c = _read_correlation(args.path, args.norm_tol)
    if not 0 <= args.party < c.parties:
        raise _Fail(EXIT_IO, f"party {args.party} out of range for {c.parties} parties")
    try:
        opts = AmsOptions.parse(args.ordering)
        reports = [dimension_bound(c, args.party, opts, args.inf_threshold)]
    except ValueError as exc:
        raise _Fail(EXIT_IO, str(exc)) from exc
    if args.grouped:
        reports.append(dimension_bound_grouped(c, args.party, args.inf_threshold))
    if args.format == "json":
        docs = [r.to_document() for r in reports]
        _emit(json.dumps(docs[0] if len(docs) == 1 else docs, indent=2) + "\n", args.out)
    elif args.format == "csv":
        _emit(_bound_csv(reports), args.out)
    else:
        _emit("\n\n".join(r.format_table() for r in reports) + "\n", args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        c = generate(args.family, args.parties, args.d)
    except ValueError as exc:
        raise _Fail(EXIT_IO, str(exc)) from exc
    _emit(corr.dumps(c), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        scenario = read_scenario(args.path)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {args.path}: {exc}") from exc
    except (ScenarioError, ValueError) as exc:
        raise _Fail(EXIT_IO, f"bad scenario: {exc}") from exc
    c = born_correlation(scenario, args.method)
    _emit(corr.dumps(c), args.out)
    return EXIT_OK


def cmd_table(args) -> int:
    try:
        opts = AmsOptions.parse(args.ordering)
        rows = table_rows(args.table, args.d, args.trials, args.seed, opts, args.entries)
    except ValueError as exc:
        raise _Fail(EXIT_IO, str(exc)) from exc
    _emit(render_rows(rows, args.format), args.out)
    return EXIT_OK


def _nonneg(text: str) -> float:
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError("tolerances must be >= 0")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dimbound", description="Device-independent dimension bounds for multiparty correlations.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv", "table"), default="table"):
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--format", choices=formats, default=default)

    sp = sub.add_parser("validate", help="check normalization, negativity and no-signalling")
    sp.add_argument("path")
    common(sp, ("json", "table"))
    sp.add_argument("--norm-tol", type=_nonneg, default=corr.NORM_TOL)
    sp.add_argument("--ns-tol", type=_nonneg, default=corr.NS_TOL)
    sp.add_argument("--skip-ns", action="store_true", help="omit the no-signalling section")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("bound", help="dimension lower bound for one party")
    sp.add_argument("path")
    common(sp)
    sp.add_argument("--party", type=int, default=0)
    sp.add_argument("--ordering", default="per-term", help="fixed:<perm>, global or per-term")
    sp.add_argument("--norm-tol", type=_nonneg, default=corr.NORM_TOL)
    sp.add_argument("--inf-threshold", type=_nonneg, default=0.0)
    sp.add_argument("--grouped", action="store_true", help="also report the bound with all other parties fused")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("generate", help="write a closed-form correlation")
    sp.add_argument("family", choices=FAMILIES)
    sp.add_argument("--parties", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("simulate", help="Born-rule correlation of a scenario file")
    sp.add_argument("path")
    sp.add_argument("--out")
    sp.add_argument("--method", choices=("auto", "trace", "branches"), default="auto")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("table", help="averaged bounds over random tripartite ensembles")
    sp.add_argument("table", type=int, choices=(1, 2, 3, 4, 5))
    common(sp, ("csv", "json", "table"), "csv")
    sp.add_argument("--d", type=int, nargs="+", help="local dimensions (default: 2 3 4; table 4: 3)")
    sp.add_argument("--trials", type=_positive_int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ordering", default="per-term")
    sp.add_argument("--entries", choices=MATRIX_ENTRIES, default="uniform", help="random matrix entry distribution")
    sp.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
