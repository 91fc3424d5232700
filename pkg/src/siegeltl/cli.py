"""Command-line entry point: ``siegeltl {poly,siegel-dist,siegel-tlen,cover-table}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import polyinv, siegel, symplinalg
from .errors import CapExceededError, InputError, LiftError, NumericalError, SiegelTLError
from .surfcover import fixtures, table
from .surfcover.quotients import MAX_DEGREE, mod_k_cover, parse_quotient_list
from .surfcover.words import parse_automorphism

EXIT_OK, EXIT_INPUT, EXIT_LIFT, EXIT_CAP = 0, 2, 3, 4


def _num(x: float) -> str:
    return format(x, ".10g")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def cmd_poly(args) -> str:
    p = polyinv.parse_polynomial(_read(args.file))
    m, w, h = polyinv.invariants(p)
    try:
        mq = _num(polyinv.mahler_log_quadrature(p, tol=args.tol))
    except (NumericalError, CapExceededError, InputError):
        mq = "n/a"
    if p.is_exact:
        sign = polyinv.reciprocity_sign(p)
        recip = f"{str(sign != 0).lower()} (sign {sign:+d})" if sign else "false"
    else:
        recip = "n/a"
    lines = [f"degree={p.degree}", f"m={_num(m)}", f"m_quadrature={mq}", f"w={_num(w)}",
             f"h={_num(h)}", f"reciprocal={recip}"]
    return "\n".join(lines) + "\n"


def cmd_siegel_dist(args) -> str:
    Z = siegel.parse_siegel_point(_read(args.z))
    W = siegel.parse_siegel_point(_read(args.w))
    return f"dist={_num(siegel.dist(Z, W, method=args.method))}\n"


def cmd_siegel_tlen(args) -> str:
    M = symplinalg.validate_symplectic(symplinalg.parse_matrix(_read(args.file)), tol=args.tol)
    closed = siegel.translation_length_closed(M)
    lines = [f"p={M.p}", f"closed={_num(closed)}"]
    if args.numeric:
        res = siegel.translation_length_numeric(M, starts=args.starts, seed=args.seed)
        lines += [f"numeric={_num(res.estimate)}", f"gap={_num(res.estimate - closed)}",
                  f"converged={str(res.converged).lower()}"]
    return "\n".join(lines) + "\n"


def _load_automorphism(spec: str):
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in fixtures.builtin_names():
            raise InputError(f"unknown built-in {name!r}; choose from {', '.join(fixtures.builtin_names())}")
        return fixtures.builtin(name)
    return parse_automorphism(_read(spec))


def cmd_cover_table(args) -> str:
    auto = _load_automorphism(args.automorphism)
    pres = auto.presentation
    covers = []
    for path in args.covers or []:
        covers += parse_quotient_list(_read(path), pres, args.max_degree)
    for k in args.modk or []:
        covers.append(mod_k_cover(pres, k, args.max_degree))
    if not covers:
        covers.append(mod_k_cover(pres, 2, args.max_degree))
    if args.wp_bound is not None and args.wp_bound < 0:
        raise InputError("--wp-bound must be nonnegative")
    rows = table.growth_table(auto, covers, args.wp_bound)
    return table.table_csv(rows, with_flag=args.wp_bound is not None)


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of standard output")
    parser = argparse.ArgumentParser(prog="siegeltl", description=__doc__,
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("poly", parents=[common], formatter_class=fmt,
                       help="Mahler measure, Jensen square sum and log-house of a monic polynomial")
    p.add_argument("file", help="one line of coefficients, leading first")
    p.add_argument("--tol", type=_positive(float), default=1e-9, help="quadrature tolerance")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("siegel-dist", parents=[common], formatter_class=fmt,
                       help="distance between two points of Siegel space")
    p.add_argument("z")
    p.add_argument("w")
    p.add_argument("--method", choices=["series", "spectral"], default="series")
    p.set_defaults(func=cmd_siegel_dist)

    p = sub.add_parser("siegel-tlen", parents=[common], formatter_class=fmt,
                       help="translation length of a symplectic matrix on Siegel space")
    p.add_argument("file", help="first line p, then 2p rows of 2p entries")
    p.add_argument("--tol", type=_positive(float), default=1e-9, help="symplectic validation tolerance")
    p.add_argument("--numeric", action="store_true", help="also run the multi-start minimizer")
    p.add_argument("--starts", type=_positive(int), default=4, help="minimizer starts")
    p.add_argument("--seed", type=int, default=0, help="seed for perturbed starts")
    p.set_defaults(func=cmd_siegel_tlen)

    p = sub.add_parser("cover-table", parents=[common], formatter_class=fmt,
                       help="growth table of lifted actions over finite covers (CSV)")
    p.add_argument("automorphism", help="automorphism file, or builtin:<name> (identity, pa, twist_c1 ...)")
    p.add_argument("--covers", action="append", metavar="FILE",
                   help="quotient file (repeatable); blocks start with 'degree n' or 'modk k'")
    p.add_argument("--modk", action="append", type=int, metavar="K",
                   help="add the mod-K homology cover (repeatable); mod 2 if no cover is given")
    p.add_argument("--wp-bound", type=float, default=None,
                   help="add the flag column sqrt(w/n) <= bound/sqrt(4 pi)")
    p.add_argument("--max-degree", type=_positive(int), default=MAX_DEGREE, help="cover degree cap")
    p.set_defaults(func=cmd_cover_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIFT
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except SiegelTLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIFT
    if args.out:
        Path(args.out).write_text(report)
    else:
        sys.stdout.write(report)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
