"""Command-line entry point ``wallcross``.

Exit codes: 0 success, 2 usage or parse error, 3 non-integral invariant,
4 support-property violation, 5 non-generic or degenerate wall.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .autos import commutator, make_theta
from .factor import Direction, RaySpectrum, factorize
from .lattice import Pairing, slope_key
from .stabfile import StabilityFileError, dump_stability, load_stability
from .stability import (
    CentralCharge,
    DegeneratePathError,
    NonGenericPathError,
    StabilityData,
    StabilityError,
    SupportViolationError,
    Wall,
    Surd,
    check_support,
    cross_wall,
    lift_path,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONINTEGRAL = 3
EXIT_SUPPORT = 4
EXIT_NONGENERIC = 5

DEFAULT_ORDER = 8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"malformed rational {text!r}") from None


def thread_cap() -> int:
    """Value of ``WCF_THREADS`` (0 = auto).  The current algorithms run on one thread."""
    raw = os.environ.get("WCF_THREADS", "0")
    try:
        v = int(raw)
    except ValueError:
        raise StabilityFileError(f"WCF_THREADS must be a non-negative integer, got {raw!r}") from None
    if v < 0:
        raise StabilityFileError(f"WCF_THREADS must be a non-negative integer, got {raw!r}")
    return v


def commutator_spectrum(k: int, order: int) -> RaySpectrum:
    p = Pairing(k)
    s = make_theta((1, 0), 1, p, order)
    t = make_theta((0, 1), 1, p, order)
    return factorize(commutator(s, t), Direction.CLOCKWISE)


def format_rows(rows, fmt: str, meta: dict) -> str:
    if fmt == "json":
        doc = dict(meta)
        doc["rows"] = [{"a": a, "b": b, "n": n, "omega": str(om)} for a, b, n, om in rows]
        return json.dumps(doc, indent=2) + "\n"
    lines = ["a\tb\tn\tomega"]
    lines += [f"{a}\t{b}\t{n}\t{om}" for a, b, n, om in rows]
    return "\n".join(lines) + "\n"


def cmd_factor_commutator(args) -> int:
    spec = commutator_spectrum(args.k, args.order)
    sys.stdout.write(format_rows(spec.rows(), args.format, {"k": args.k, "order": args.order}))
    if not spec.is_integral():
        bad = [(a, b, n, str(om)) for a, b, n, om in spec.rows() if om.denominator != 1]
        print(f"non-integral invariants: {bad}", file=sys.stderr)
        return EXIT_NONINTEGRAL
    return EXIT_OK


def _report_violations(report) -> None:
    for v in report.violations:
        print(f"support violation: {v}", file=sys.stderr)


def _omega_diff(before: RaySpectrum, after: RaySpectrum) -> list[str]:
    a, b = before.omegas(), after.omegas()
    lines = []
    for x in sorted(set(a) | set(b), key=lambda c: (slope_key(c), c.degree)):
        old, new = a.get(x, Fraction(0)), b.get(x, Fraction(0))
        if old != new:
            lines.append(f"Omega{tuple(x)}: {old} -> {new}")
    return lines


def sector_wall(sd: StabilityData) -> Wall | None:
    """The wall bounding the whole support: its extreme rays, on the side given by ``sd.charge``."""
    rays = sd.spectrum.rays()
    if len(rays) < 2:
        return None
    hi, lo = rays[0], rays[-1]
    side = sd.charge.orientation(lo, hi)
    if side == 0:
        raise NonGenericPathError("central charge lies on the wall; cannot tell the side",
                                  [(tuple(hi), tuple(lo))])
    return Wall(Surd(Fraction(0)), (hi, lo), side)


def cmd_cross_wall(args) -> int:
    sd = load_stability(args.input, args.order)
    report = check_support(sd)
    if not report.ok:
        _report_violations(report)
        return EXIT_SUPPORT
    wall = sector_wall(sd)
    out = sd if wall is None else cross_wall(sd, wall)
    with open(args.output, "w") as fh:
        fh.write(dump_stability(out))
    for line in _omega_diff(sd.spectrum, out.spectrum) or ["no change"]:
        print(line)
    return EXIT_OK


def cmd_check_support(args) -> int:
    sd = load_stability(args.input)
    report = check_support(sd)
    if report.ok:
        print("ok")
        return EXIT_OK
    for v in report.violations:
        print(f"{v.vector[0]}\t{v.vector[1]}\t{v.reason}")
    return EXIT_SUPPORT


def cmd_lift_path(args) -> int:
    sd = load_stability(args.input, args.order)
    report = check_support(sd)
    if not report.ok:
        _report_violations(report)
        return EXIT_SUPPORT
    z_end = CentralCharge.from_values(*args.z_end)
    out = lift_path(sd, z_end)
    with open(args.output, "w") as fh:
        fh.write(dump_stability(out))
    for line in _omega_diff(sd.spectrum, out.spectrum) or ["no change"]:
        print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wallcross", description="Wall-crossing factorizations on a rank-2 lattice.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("factor-commutator", help="factor the commutator of theta_(1,0) and theta_(0,1)")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--order", type=_positive, default=DEFAULT_ORDER)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.set_defaults(func=cmd_factor_commutator)

    p = sub.add_parser("cross-wall", help="cross the wall bounding the support")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=_positive, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_cross_wall)

    p = sub.add_parser("check-support", help="verify the support property")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_check_support)

    p = sub.add_parser("lift-path", help="lift the straight path to a new central charge")
    p.add_argument("--input", required=True)
    p.add_argument("--z-end", type=_rational, nargs=4, required=True,
                   metavar=("RE1", "IM1", "RE2", "IM2"))
    p.add_argument("--order", type=_positive, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_lift_path)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        thread_cap()
        return args.func(args)
    except (StabilityFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SupportViolationError as exc:
        _report_violations(exc.report)
        return EXIT_SUPPORT
    except (NonGenericPathError, DegeneratePathError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONGENERIC
    except StabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
