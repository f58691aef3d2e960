"""Command line front end.

    canheight compute --curve a1,a2,a3,a4,a6 --point x,y [--digits N | --bits N]
    canheight bench --digits 500 5000 --repetitions 5

Points use decimal integers or num/den for each coordinate, or ``O``.
Negative values need the ``=`` form, e.g. ``--point=-1,1``.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import statistics
import sys
import time
from fractions import Fraction
from math import ceil, floor, log2, log10

from .height import canonical_height
from .model import O, NotOnCurve, SingularCurve, WeierstrassModel
from .nonarch_global import PsiFiniteOptions
from .reals import format_fixed

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_ON_CURVE = 3
EXIT_SINGULAR = 4

NORMALIZATION = "CPS (twice Silverman-book)"
DEFAULT_DIGITS = 30


class ParseError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def parse_curve(text: str) -> tuple[int, ...]:
    parts = text.split(",")
    if len(parts) != 5:
        raise ParseError(f"expected 5 coefficients a1,a2,a3,a4,a6, got {text!r}")
    try:
        return tuple(int(p.strip()) for p in parts)
    except ValueError:
        raise ParseError(f"coefficients must be integers: {text!r}") from None


def parse_point(text: str):
    if text.strip().upper() == "O":
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(f"expected x,y or O, got {text!r}")
    try:
        return tuple(Fraction(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"coordinates must be integers or num/den: {text!r}") from None


def digits_to_bits(digits: int) -> int:
    return ceil(digits * log2(10)) + 4


def bits_to_digits(bits: int) -> int:
    return max(1, floor(bits * log10(2)))


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _as_json(W, P, res, digits: int) -> dict:
    fmt = lambda v: None if v is None else format_fixed(v, digits)
    return {
        "curve": [str(a) for a in W.coefficients],
        "point": "O" if P.is_zero else {"x": _frac(P.x), "y": _frac(P.y)},
        "precision_bits": res.precision_bits,
        "h_naive": fmt(res.h_naive),
        "psi_finite": {
            "terms": [{"q": str(q), "mu": _frac(mu)} for q, mu in res.psi_finite],
            "value": fmt(res.psi_finite_value),
        },
        "psi_infinity": fmt(res.psi_infinity),
        "h_canonical": fmt(res.h_canonical),
        "normalization": NORMALIZATION,
        "torsion_order": res.torsion_order,
    }


def _as_text(res, digits: int, breakdown: bool) -> list[str]:
    value = format_fixed(res.h_canonical, digits)
    if res.torsion_order is not None:
        value += f" (torsion, order {res.torsion_order})"
    if not breakdown:
        return [value]
    pf = res.psi_finite
    lines = [
        f"h_canonical: {value}",
        f"h_naive: {format_fixed(res.h_naive, digits)}",
        "psi_infinity: " + ("n/a (2-torsion)" if res.psi_infinity is None else format_fixed(res.psi_infinity, digits)),
        f"psi_finite: {pf} = {format_fixed(res.psi_finite_value, digits)}" if pf else "psi_finite: 0 (empty)",
    ]
    for q, mu in pf:
        lines.append(f"  q={q} mu={mu}")
    lines.append(f"normalization: {NORMALIZATION}")
    return lines


def cmd_compute(args) -> int:
    try:
        coeffs = parse_curve(args.curve)
        xy = parse_point(args.point)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        W = WeierstrassModel(*coeffs)
    except SingularCurve as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    try:
        P = O if xy is None else W.point(*xy)
    except NotOnCurve as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_ON_CURVE

    if args.bits is not None:
        bits, digits = args.bits, bits_to_digits(args.bits)
    else:
        digits = args.digits
        bits = digits_to_bits(digits)
    opts = PsiFiniteOptions(
        trial_division_bound=args.trial_division,
        use_2b4_variant=args.variant_2b4,
        incremental_basis=args.incremental_basis,
    )
    res = canonical_height(W, P, bits, opts=opts, arch_method=args.arch_method)
    if args.json:
        print(json.dumps(_as_json(W, P, res, digits), indent=2))
    else:
        print("\n".join(_as_text(res, digits, args.breakdown)))
    return EXIT_OK


def bench_family(digits: int, repetitions: int, rng: random.Random, precision_digits: int = DEFAULT_DIGITS) -> list[float]:
    """Wall times for y^2 = x^3 - a x + a, P = (1, 1), one random a per run."""
    bits = digits_to_bits(precision_digits)
    times = []
    for _ in range(repetitions):
        a = rng.randrange(10 ** (digits - 1), 10**digits)
        W = WeierstrassModel(0, 0, 0, -a, a)
        P = W.point(1, 1)
        start = time.perf_counter()
        canonical_height(W, P, bits)
        times.append(time.perf_counter() - start)
    return times


def cmd_bench(args) -> int:
    rng = random.Random(args.seed)
    medians = {}
    for digits in args.digits:
        times = bench_family(digits, args.repetitions, rng, args.precision_digits)
        if not times:
            print(f"digits={digits} repetitions=0 (empty)")
            continue
        medians[digits] = statistics.median(times)
        print(f"digits={digits} repetitions={len(times)} median_seconds={medians[digits]:.6f}")
    if len(medians) >= 2:
        lo, hi = min(medians), max(medians)
        print(f"ratio {hi}/{lo} digits: {medians[hi] / medians[lo]:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="canheight", description="Canonical heights on elliptic curves over Q.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="canonical height of one point")
    c.add_argument("--curve", required=True, help="a1,a2,a3,a4,a6")
    c.add_argument("--point", required=True, help="x,y (integers or num/den) or O")
    prec = c.add_mutually_exclusive_group()
    prec.add_argument("--digits", type=int, default=DEFAULT_DIGITS, help="decimal digits (default 30)")
    prec.add_argument("--bits", type=int, help="absolute precision in bits")
    c.add_argument("--breakdown", action="store_true", help="also print h, psi_infinity and psi_finite")
    c.add_argument("--json", action="store_true", help="machine readable output")
    c.add_argument("--arch-method", choices=("agm", "series"), default="agm")
    c.add_argument("--trial-division", type=int, default=1, metavar="T", help="strip primes <= T first")
    c.add_argument("--variant-2b4", action="store_true", help="smaller truncation with convergent selection")
    c.add_argument("--incremental-basis", action="store_true", help="per-block moduli in the finite part")
    c.set_defaults(func=cmd_compute)

    b = sub.add_parser("bench", help="time the family y^2 = x^3 - a x + a at P = (1, 1)")
    b.add_argument("--digits", type=int, nargs="+", default=[100], help="sizes of a in decimal digits")
    b.add_argument("--repetitions", type=int, default=5)
    b.add_argument("--precision-digits", type=int, default=DEFAULT_DIGITS)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    # coefficients may have thousands of digits
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    if getattr(args, "digits", None) is not None and args.command == "compute" and args.digits < 1:
        print("error: --digits must be positive", file=sys.stderr)
        return EXIT_PARSE
    if getattr(args, "bits", None) is not None and args.bits < 1:
        print("error: --bits must be positive", file=sys.stderr)
        return EXIT_PARSE
    if args.command == "compute" and args.trial_division < 1:
        print("error: --trial-division must be >= 1", file=sys.stderr)
        return EXIT_PARSE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
