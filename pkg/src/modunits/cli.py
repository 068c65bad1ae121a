"""Command-line interface; every subcommand prints one JSON document to stdout.

Exit codes: 0 on a result or verdict, 2 on bad input or a failed precondition,
3 on an internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .arith import parse_rational
from .cusps import Cusp, WidthSearchError, conductor_lcm_widths, conductor_modular, cusp_classes, fan_width
from .grammar import UnitParseError, format_unit, parse_unit
from .level import (
    InternalInconsistency,
    PreconditionError,
    ambiguity_character,
    detect_root_level,
    quad_extension_test,
    sample_units,
)
from .psl2 import InconsistentOracle, SubgroupHandle, full_group, gamma, gamma0, gamma1, index_gamma
from .qseries import PrecisionError, RootShapeError
from .units import MultiplierSnapError, j_qexp, product_qexp

EXIT_OK, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 2, 3

_SUBGROUP_RE = re.compile(r"^\s*(Gamma0|Gamma1|Gamma)\s*\(\s*(\d+)\s*\)\s*$")


def parse_subgroup(text: str) -> SubgroupHandle:
    """'Gamma(N)', 'Gamma0(N)', 'Gamma1(N)' or 'full'."""
    if text.strip().lower() in ("full", "gamma", "psl2z"):
        return full_group()
    m = _SUBGROUP_RE.match(text)
    if not m:
        raise ValueError(f"unknown subgroup name {text!r}; use Gamma(N), Gamma0(N), Gamma1(N) or full")
    kind, n = m.group(1), int(m.group(2))
    if n < 1:
        raise ValueError("subgroup level must be positive")
    return {"Gamma": gamma, "Gamma0": gamma0, "Gamma1": gamma1}[kind](n)


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _subgroup_arg(args) -> SubgroupHandle:
    return parse_subgroup(args.subgroup) if args.subgroup else gamma(args.level)


def cmd_index(args):
    return {"level": args.level, "index": index_gamma(args.level)}


def cmd_cusps(args):
    H = _subgroup_arg(args)
    return {"subgroup": H.name, **cusp_classes(H).to_json()}


def cmd_widths(args):
    H = _subgroup_arg(args)
    cusps = [Cusp.parse(args.cusp)] if args.cusp else cusp_classes(H).classes
    return {"subgroup": H.name, "widths": [{"cusp": str(c), "width": fan_width(H, c)} for c in cusps]}


def cmd_conductor(args):
    H = parse_subgroup(args.subgroup)
    if args.level % H.modulus_hint:
        raise PreconditionError(f"{H.name} does not factor through reduction mod {args.level}")
    n = conductor_modular(H, args.level)
    return {
        "subgroup": H.name,
        "modulus": args.level,
        "conductor": n if n is not None else f"not congruence at {args.level}",
        "lcm_widths": conductor_lcm_widths(H),
    }


def cmd_expand(args):
    f = parse_unit(args.unit)
    return {"unit": format_unit(f), "series": product_qexp(f, parse_rational(args.prec)).to_json()}


def cmd_root_level(args):
    f = parse_unit(args.unit)
    prec = parse_rational(args.prec) if args.prec else None
    rep = detect_root_level(f, args.prime, prec, level=args.level, series_check=not args.no_series_check)
    return {"unit": format_unit(f), **rep.to_json()}


def cmd_quad_test(args):
    f = parse_unit(args.unit)
    prec = parse_rational(args.prec) if args.prec else None
    N = args.level or f.level
    chi = ambiguity_character(f, 2, N, N)
    if chi.is_trivial():
        raise PreconditionError("f is a square in the level-N function field; the test needs a non-square")
    return {"unit": format_unit(f), "base_level": N, "square_times_j_minus_1728": quad_extension_test(f, prec, N)}


def cmd_j(args):
    return {"series": j_qexp(parse_rational(args.prec)).to_json()}


def cmd_corpus(args):
    units = sample_units(args.level, args.prime, args.count, seed=args.seed)
    rows = []
    for f in units:
        rep = detect_root_level(f, args.prime, series_check=False)
        row = {"unit": format_unit(f), "verdict": rep.verdict_label, "stabilizer_index": rep.stabilizer_index}
        if args.prime == 2:
            row["quad_test"] = quad_extension_test(f)
        rows.append(row)
    return {"level": args.level, "prime": args.prime, "seed": args.seed, "units": rows}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modunits", description="Congruence subgroups, modular units and p-th root levels.")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled suites")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="[PSL2(Z) : Gamma(N)]")
    p.add_argument("--level", type=_positive, required=True)
    p.set_defaults(func=cmd_index)

    for name, func, help_ in (("cusps", cmd_cusps, "cusp classes and widths"),
                              ("widths", cmd_widths, "fan widths")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--level", type=_positive, default=1)
        p.add_argument("--subgroup", help="overrides --level: Gamma(N), Gamma0(N), Gamma1(N) or full")
        if name == "widths":
            p.add_argument("--cusp", help="a single cusp p/q (1/0 is infinity)")
        p.set_defaults(func=func)

    p = sub.add_parser("conductor", help="conductor of a subgroup presented at modulus M")
    p.add_argument("--level", type=_positive, required=True, help="the modulus M")
    p.add_argument("--subgroup", required=True)
    p.set_defaults(func=cmd_conductor)

    p = sub.add_parser("expand", help="q-expansion of a unit product")
    p.add_argument("--unit", required=True)
    p.add_argument("--prec", required=True)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("root-level", help="level of the p-th root of a unit")
    p.add_argument("--unit", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--prec")
    p.add_argument("--level", type=_positive, help="base level N (default: lcm of symbol denominators)")
    p.add_argument("--no-series-check", action="store_true", help="skip the q-series re-affirmation")
    p.set_defaults(func=cmd_root_level)

    p = sub.add_parser("quad-test", help="is f (j - 1728) a square at level N?")
    p.add_argument("--unit", required=True)
    p.add_argument("--prec")
    p.add_argument("--level", type=_positive)
    p.set_defaults(func=cmd_quad_test)

    p = sub.add_parser("j", help="q-expansion of j")
    p.add_argument("--prec", required=True)
    p.set_defaults(func=cmd_j)

    p = sub.add_parser("corpus", help="verdicts on a seeded sample of level-N units")
    p.add_argument("--level", type=_positive, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--count", type=_positive, default=10)
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except UnitParseError as e:
        return _fail({"error": "parse", "message": e.reason, "byte": e.pos}, EXIT_PRECONDITION)
    except PreconditionError as e:
        body = {"error": "precondition", "message": str(e)}
        if e.witness is not None:
            body["witness"] = e.witness.rows()
        return _fail(body, EXIT_PRECONDITION)
    except (InternalInconsistency, InconsistentOracle, WidthSearchError, MultiplierSnapError) as e:
        return _fail({"error": "internal", "message": str(e)}, EXIT_INTERNAL)
    except (ValueError, PrecisionError, RootShapeError, ZeroDivisionError) as e:
        return _fail({"error": "input", "message": str(e)}, EXIT_PRECONDITION)
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _fail(body: dict, code: int) -> int:
    json.dump(body, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
