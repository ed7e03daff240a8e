"""Command line front end: ``polystab analyze | repro | plot``.

Exit codes: 0 success, 1 a declared expectation failed, 2 input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import NumericalError, ValidationError
from .repro import REGISTRY, parse_range, run_analyze, run_repro

EXIT_OK, EXIT_EXPECTATION, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


def _parse_params(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValidationError(f"--param expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _emit(report, out_dir):
    for line in report.summary_lines():
        print(line)
    if out_dir is not None:
        for path in report.write(out_dir):
            print(f"wrote {path}")


def cmd_analyze(args) -> int:
    report = run_analyze(
        args.spec,
        resolvent=parse_range(args.resolvent) if args.resolvent else None,
        decay=parse_range(args.decay) if args.decay else None,
        delta=parse_range(args.delta) if args.delta else None,
    )
    _emit(report, args.out)
    return EXIT_OK


def cmd_repro(args) -> int:
    report = run_repro(args.example_id, _parse_params(args.param))
    _emit(report, args.out)
    return EXIT_OK if report.passed else EXIT_EXPECTATION


def cmd_plot(args) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .resolvent import SweepSamples

    path = Path(args.csv)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    sweep = SweepSamples.from_csv(text)
    ok = sweep.finite & (sweep.values > 0)
    plt.rcParams["svg.hashsalt"] = "polystab"
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(sweep.params[ok], sweep.values[ok], lw=1.0)
    ax.set_xlabel("t" if sweep.axis == "time" else "omega")
    ax.set_ylabel("norm")
    ax.set_title(args.title or path.stem)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polystab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="verdict, spectrum and optional sweeps for a system spec")
    p.add_argument("spec", help="system spec JSON file")
    p.add_argument("--resolvent", metavar="lo:hi:n", help="resolvent-norm sweep on [lo, hi] with n points")
    p.add_argument("--decay", metavar="lo:hi:n", help="||T(t) A^-1|| on [lo, hi] with n points")
    p.add_argument("--delta", metavar="lo:hi:n", help="sample the loop operator (full systems)")
    p.add_argument("--out", metavar="DIR", help="write report.json and sweep CSVs here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("repro", help="rebuild a named example and check its expected outcome")
    p.add_argument("example_id", choices=sorted(REGISTRY), metavar="ID",
                   help="one of: " + ", ".join(sorted(REGISTRY)))
    p.add_argument("--param", action="append", metavar="k=v", help="override a parameter")
    p.add_argument("--out", metavar="DIR", help="write report.json and sweep CSVs here")
    p.set_defaults(func=cmd_repro)

    p = sub.add_parser("plot", help="log-log SVG line chart of a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--out", required=True, metavar="FIG.svg")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"polystab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"polystab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
