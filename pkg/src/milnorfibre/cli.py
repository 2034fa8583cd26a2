"""Command-line interface: ``milnorfibre <command> ...``.

Exit status is 0 on success, 1 when a verification reports a mismatch and
2 on invalid input or any other error.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path

from milnorfibre.critical import CertificationError, morse_report
from milnorfibre.germ import InvalidGermError, build_germ, enumerate_catalog, format_code, parse_code
from milnorfibre.morsify import ParameterOutOfRange, build_family
from milnorfibre.poly import PolySyntaxError
from milnorfibre.predict import SCHEMA_VERSION, predict_table, render_tables, rows_to_csv, table_rows
from milnorfibre.verify import FibreSpecError, compare_many, plot_fibre

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2
DEFAULT_KMAX, DEFAULT_NMAX = 9, 3

_FRACTION = re.compile(r"[+-]?\d+(?:/\d+)?")


def fraction_arg(text: str) -> Fraction:
    """Exact rational such as ``1/16`` or ``-3``; decimals are refused."""
    if not _FRACTION.fullmatch(text.strip()):
        raise argparse.ArgumentTypeError(f"expected an exact fraction like 1/16, got {text!r}")
    return Fraction(text.strip())


def positive_fraction(text: str) -> Fraction:
    value = fraction_arg(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive value, got {text!r}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------


def cmd_germ(args) -> int:
    d = parse_code(args.code)
    print(build_germ(d))
    return EXIT_OK


def cmd_predict(args) -> int:
    if args.all:
        rows = table_rows(args.kmax, args.nmax)
        if args.format == "json":
            _emit(_dump({"schema_version": SCHEMA_VERSION, "rows": rows}), args.output)
        else:
            _emit(rows_to_csv(rows), args.output)
        return EXIT_OK
    if not args.code:
        raise InvalidGermError("predict needs a germ code or --all")
    p = predict_table(parse_code(args.code))
    if args.format == "json":
        _emit(_dump({"schema_version": SCHEMA_VERSION, "germ": args.code, **p.to_json()}), args.output)
    else:
        _emit(p.pair() + "\n", args.output)
    return EXIT_OK


def cmd_critical(args) -> int:
    report = morse_report(parse_code(args.code), t0=args.t)
    if args.format == "json":
        _emit(_dump(report.to_json()), args.output)
    else:
        lines = [
            f"germ {format_code(report.germ)}  t = {report.t0}",
            f"critical points: {report.count}",
        ]
        for p in report.oracle:
            mid = ", ".join(f"{m:.12g}" for m in p.midpoint)
            lines.append(f"  ({mid})  index {p.morse_index}")
        lines.append(f"certified: {report.certified}")
        lines.append(f"closed form agrees: {report.closed_form_matches_oracle}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if report.certified and report.closed_form_matches_oracle else EXIT_MISMATCH


def cmd_morsify(args) -> int:
    fam = build_family(parse_code(args.code))
    _emit(_dump({"schema_version": SCHEMA_VERSION, **fam.to_json()}), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.all:
        descriptors = [d for d in enumerate_catalog(max(args.kmax, 4), min(args.nmax, 2)) if d.n + 1 <= 3
                       and (d.k is None or d.k <= args.kmax)]
    else:
        if not args.code:
            raise InvalidGermError("verify needs a germ code or --all")
        descriptors = [parse_code(args.code)]
    sides = ("plus", "minus") if args.side == "both" else (args.side,)
    params = {"epsilon": args.epsilon, "eta": args.eta, "resolution": args.resolution}
    verdicts = compare_many(descriptors, sides, workers=args.workers, **params)
    if args.format == "json":
        payload = [v.to_json() for v in verdicts]
        _emit(_dump(payload[0] if len(payload) == 1 else {"schema_version": SCHEMA_VERSION, "verdicts": payload}),
              args.output)
    else:
        lines = []
        for v in verdicts:
            obs = "; ".join(
                f"{side} {r.poincare} b={list(r.betti)}{'' if r.stable else ' UNSTABLE'}" for side, r in v.reports.items()
            )
            lines.append(f"{v.germ}: {v.status}  [{obs}]")
            lines.extend(f"  {n}" for n in v.notes)
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_MISMATCH if any(not v.ok for v in verdicts) else EXIT_OK


def cmd_table(args) -> int:
    tables = render_tables(args.kmax, args.nmax)
    part = tables[args.which]
    if args.format == "md":
        text = part["markdown"]
    elif args.format == "csv":
        text = part["csv"]
    else:
        text = _dump({"schema_version": SCHEMA_VERSION, "table": args.which, "rows": part["rows"]})
    _emit(text, args.output)
    return EXIT_OK


def cmd_plot_svg(args) -> int:
    d = parse_code(args.code)
    svg = plot_fibre(d, args.side, args.epsilon, args.eta, args.resolution)
    out = args.output or f"{format_code(d)}_{args.side}.svg"
    Path(out).write_text(svg)
    print(out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _mesh_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=positive_fraction, help="ball radius, e.g. 1/2")
    p.add_argument("--eta", type=positive_fraction, help="fibre level, e.g. 1/512")
    p.add_argument("--resolution", type=positive_int, help="grid cells per axis")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="milnorfibre", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("germ", help="print the polynomial of a germ code")
    p.add_argument("code")
    p.set_defaults(func=cmd_germ)

    p = sub.add_parser("predict", help="published Poincaré polynomials")
    p.add_argument("code", nargs="?")
    p.add_argument("--all", action="store_true", help="the whole catalog as a table")
    p.add_argument("--kmax", type=positive_int, default=DEFAULT_KMAX)
    p.add_argument("--nmax", type=positive_int, default=DEFAULT_NMAX)
    p.add_argument("--format", choices=("text", "csv", "json"), default=None)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("critical", help="certified critical points of the morsification")
    p.add_argument("code")
    p.add_argument("--t", type=fraction_arg, default=None, help="deformation parameter, e.g. -1/2")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("morsify", help="the morsification family as JSON")
    p.add_argument("code")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_morsify)

    p = sub.add_parser("verify", help="mesh the fibres and compare with the prediction")
    p.add_argument("code", nargs="?")
    p.add_argument("--all", action="store_true", help="every catalog germ with n <= 2")
    p.add_argument("--kmax", type=positive_int, default=7)
    p.add_argument("--nmax", type=positive_int, default=1)
    p.add_argument("--side", choices=("plus", "minus", "both"), default="both")
    _mesh_flags(p)
    p.add_argument("--workers", type=positive_int, default=None, help="parallel workers (default: MILNORFIBRE_WORKERS or 1)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="render a result table")
    p.add_argument("which", choices=("theorem", "corollary"))
    p.add_argument("--kmax", type=positive_int, default=DEFAULT_KMAX)
    p.add_argument("--nmax", type=positive_int, default=DEFAULT_NMAX)
    p.add_argument("--format", choices=("md", "csv", "json"), default=None)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("plot-svg", help="draw a plane-curve fibre as SVG")
    p.add_argument("code")
    p.add_argument("--side", choices=("plus", "minus"), default="plus")
    _mesh_flags(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_plot_svg)
    return parser


_VALUE_FLAGS = ("--t", "--epsilon", "--eta")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--t -1/2`` into ``--t=-1/2`` so argparse does not read a flag."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and _FRACTION.fullmatch(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_glue_negative_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "format", "unset") is None:
        # documented defaults: CSV for tables and catalog listings, text for single answers
        if args.command == "table":
            args.format = "md" if args.which == "theorem" else "csv"
        else:
            args.format = "csv" if args.all else "text"
    try:
        return args.func(args)
    except (InvalidGermError, PolySyntaxError, ParameterOutOfRange, FibreSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
