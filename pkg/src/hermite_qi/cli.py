"""Command line entry point: ``hermite-qi {masks,derive,approximate,convergence}``."""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import derivation, harness, masks
from .quasi_interp import (
    OutOfRegionError,
    assemble,
    covered_region,
    read_hermite_csv,
    read_points_csv,
    table_source,
    write_values_csv,
)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive_rational(text: str) -> Fraction:
    q = _rational(text)
    if q <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return q


def _int_list(text: str) -> list[int]:
    try:
        ns = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated integer list: {text!r}") from None
    if not ns or min(ns) < 1:
        raise argparse.ArgumentTypeError("n values must be positive integers")
    return ns


def cmd_masks(args) -> int:
    ms = masks.mask_set(args.lam, args.variant)
    report = masks.validate(ms) if args.validate else None
    with open(args.out, "w") as fh:
        fh.write(masks.dumps(ms, report) + "\n")
    if report is not None and not report.ok:
        bad = report.failures()
        first = bad[0]
        print(f"validation failed: {len(bad)} check(s), first {first.mask} {first.check}"
              f" gives {first.value} instead of {first.target}", file=sys.stderr)
        return 1
    return 0


def cmd_derive(args) -> int:
    report = derivation.derive_report(superconvergence=args.superconvergence, compare=args.compare_published)
    with open(args.out, "w") as fh:
        fh.write(derivation.dumps_report(report) + "\n")
    return 0


def cmd_approximate(args) -> int:
    table = read_hermite_csv(args.input)
    points = read_points_csv(args.eval)
    region = covered_region(table)
    if not region:
        print("error: Hermite data does not cover a single triangle stencil", file=sys.stderr)
        return 2
    # float assembly; h only fixes the vertex positions
    spl = assemble(table_source(table), masks.mask_set(args.lam), float(args.h), region)
    rows = []
    for x, y in points:
        try:
            val = spl.evaluate((x, y))
            dx, dy = spl.gradient((x, y))
        except OutOfRegionError as exc:
            print(f"error: point ({x}, {y}) {exc}", file=sys.stderr)
            return 2
        rows.append((x, y, val, dx, dy))
    write_values_csv(args.out, rows)
    return 0


def cmd_convergence(args) -> int:
    tf = harness.TEST_FUNCTIONS[args.function]
    rows = harness.convergence_table(tf, args.n, args.lam)
    harness.write_table_csv(args.out, rows)
    print(f"{tf.name}: n = {','.join(str(n) for n in args.n)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hermite-qi", description="C1 cubic Hermite quasi-interpolation on a three-direction mesh")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("masks", help="dump (and optionally validate) the mask family at a given lambda")
    m.add_argument("--lambda", dest="lam", type=_rational, required=True)
    m.add_argument("--variant", choices=masks.VARIANTS, default=masks.CORRECTED)
    m.add_argument("--validate", action="store_true")
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_masks)

    d = sub.add_parser("derive", help="rebuild the mask family from the linear conditions")
    d.add_argument("--superconvergence", action="store_true")
    d.add_argument("--compare-published", action="store_true")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_derive)

    a = sub.add_parser("approximate", help="evaluate the quasi-interpolant of tabulated Hermite data")
    a.add_argument("--input", required=True, help="CSV with header i,j,f,fx,fy")
    a.add_argument("--h", type=_positive_rational, required=True)
    a.add_argument("--lambda", dest="lam", type=_rational, default=masks.DEFAULT_LAMBDA)
    a.add_argument("--eval", required=True, help="CSV with header x,y")
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_approximate)

    c = sub.add_parser("convergence", help="sup-norm errors and convergence orders on the unit square")
    c.add_argument("--function", choices=sorted(harness.TEST_FUNCTIONS), required=True)
    c.add_argument("--n", type=_int_list, default=list(harness.BENCHMARK_NS))
    c.add_argument("--lambda", dest="lam", type=_rational, default=masks.DEFAULT_LAMBDA)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
