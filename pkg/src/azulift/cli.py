"""Command-line surface: lift scenarios to certificates and check them.

Exit codes are part of the contract: 0 success, 1 semantic failure (a
named check or precondition), 2 parse or schema failure, 3 search
exhaustion. Identical inputs and seeds produce byte-identical output
files; every check prints as one machine-readable [pass|FAIL] line.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from gmpy2 import mpq
from sympy import factorint

from .errors import (
    AzuliftError,
    FormatError,
    PreconditionViolated,
    SearchExhausted,
    WitnessSearchFailed,
)
from .formats import load_certificate, load_scenario, save_certificate
from .lift import (
    ValidationReport,
    construct_lift,
    derive_witnesses,
    validate_scenario,
    verify_certificate,
)
from .scalars import parse_rational
from .symbols import (
    Place,
    find_common_slot,
    hilbert_symbol,
    ramification_set,
    solve_norm,
    square_class,
)

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_PARSE = 2
EXIT_SEARCH = 3


def _nonzero_rational(text: str) -> mpq:
    q = parse_rational(text)
    if q == 0:
        raise FormatError("expected a nonzero rational")
    return q


def _fmt_places(places) -> str:
    # finite primes ascending, the real place last
    order = sorted(places, key=lambda v: (1, 0) if v.is_real else (0, v.v))
    return "{" + ", ".join(v.fmt() for v in order) + "}"


# -- symbols ------------------------------------------------------------------


def cmd_symbols(args) -> int:
    try:
        a = _nonzero_rational(args.a)
        b = _nonzero_rational(args.b)
    except FormatError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    ca, cb = square_class(a), square_class(b)
    places = {Place.real(), Place.finite(2)}
    for sf in (ca, cb):
        for p in factorint(abs(sf)):
            if p != 2:
                places.add(Place.finite(p))
    order = sorted(places, key=lambda v: (1, 0) if v.is_real else (0, v.v))
    for v in order:
        print(f"({a}, {b}) at {v.fmt()}: {hilbert_symbol(a, b, v):+d}")
    ram = ramification_set(a, b)
    print(f"ramified: {_fmt_places(ram)}")
    print("verdict: " + ("split" if not ram else "non-split"))
    return EXIT_OK


# -- lift ---------------------------------------------------------------------


def _effective_scenario(sc, args):
    if args.trunc is not None:
        sc = replace(sc, N=args.trunc)
    seed = sc.rng_seed
    env = os.environ.get("AZULIFT_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise FormatError(f"AZULIFT_SEED is not an integer: {env!r}") from None
    if args.seed is not None:
        seed = args.seed
    if seed != sc.rng_seed:
        sc = replace(sc, rng_seed=seed)
    return sc


def _default_cert_path(scenario_path, out_dir=None) -> Path:
    p = Path(scenario_path)
    name = p.stem + ".cert.json" if p.suffix == ".json" else p.name + ".cert.json"
    return (Path(out_dir) if out_dir else p.parent) / name


def _lift_one(scenario_path, out_path, args) -> int:
    try:
        sc = _effective_scenario(load_scenario(scenario_path), args)
    except FormatError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    vrep = validate_scenario(sc)
    print(vrep.fmt())
    if not vrep.ok:
        print("invalid: " + "; ".join(e.name for e in vrep.failures()))
        return EXIT_SEMANTIC
    try:
        w = derive_witnesses(sc)
        cert = construct_lift(sc, w)
    except (WitnessSearchFailed, SearchExhausted) as ex:
        print(f"search exhausted: {ex}")
        return EXIT_SEARCH
    except AzuliftError as ex:
        print(f"construction failed: {type(ex).__name__}: {ex}")
        return EXIT_SEMANTIC
    rep = verify_certificate(cert)
    cert.report = ValidationReport(cert.report.entries + rep.entries)
    save_certificate(cert, out_path)
    print(rep.fmt())
    print(f"certificate written: {out_path}")
    print("ok" if rep.ok else "FAILED")
    return EXIT_OK if rep.ok else EXIT_SEMANTIC


def cmd_lift(args) -> int:
    if not args.batch:
        out = Path(args.out) if args.out else _default_cert_path(args.scenario)
        return _lift_one(args.scenario, out, args)
    root = Path(args.scenario)
    if not root.is_dir():
        print(f"parse error: batch target {root} is not a directory", file=sys.stderr)
        return EXIT_PARSE
    inputs = sorted(
        p for p in root.glob("*.json") if not p.name.endswith(".cert.json")
    )
    codes = []
    for p in inputs:
        print(f"== {p.name}")
        codes.append(_lift_one(p, _default_cert_path(p, args.out), args))
    for worst in (EXIT_PARSE, EXIT_SEARCH, EXIT_SEMANTIC):
        if worst in codes:
            return worst
    return EXIT_OK


# -- verify -------------------------------------------------------------------


def cmd_verify(args) -> int:
    try:
        cert = load_certificate(args.cert)
    except FormatError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    except AzuliftError as ex:
        print(f"[FAIL] certificate-wellformed  ({type(ex).__name__}: {ex})")
        return EXIT_SEMANTIC
    rep = verify_certificate(cert)
    print(rep.fmt())
    print("ok" if rep.ok else "FAILED")
    return EXIT_OK if rep.ok else EXIT_SEMANTIC


# -- thin wrappers ------------------------------------------------------------


def cmd_solve_norm(args) -> int:
    try:
        n = _nonzero_rational(args.n)
        t = _nonzero_rational(args.b)
    except FormatError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    sol = solve_norm(n, t)
    if sol is None:
        print("obstructed: no rational solution")
        return EXIT_SEMANTIC
    u, v = sol
    print(f"u = {u}")
    print(f"v = {v}")
    return EXIT_OK


def cmd_find_slot(args) -> int:
    try:
        vals = [_nonzero_rational(s) for s in (args.a2, args.n2, args.a3, args.n3)]
    except FormatError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    try:
        y = find_common_slot(*vals)
    except PreconditionViolated as ex:
        print(f"no common slot: {ex}")
        return EXIT_SEMANTIC
    print(f"y = {y}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except FormatError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    rep = validate_scenario(sc)
    print(rep.fmt())
    print("ok" if rep.ok else "invalid")
    return EXIT_OK if rep.ok else EXIT_SEMANTIC


# -- dispatch -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="azulift",
        description="Exact lifts of degree-8 order-2 algebras over truncated local rings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symbols", help="Hilbert symbols and ramification of (a, b)")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_symbols)

    p = sub.add_parser("lift", help="run the full pipeline on a scenario file")
    p.add_argument("scenario", help="scenario file, or a directory with --batch")
    p.add_argument("--out", help="certificate path (batch: output directory)")
    p.add_argument("--trunc", type=int, help="override the truncation order")
    p.add_argument("--seed", type=int, help="override the scenario rng_seed")
    p.add_argument("--batch", action="store_true",
                   help="treat the argument as a directory of scenarios")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("verify", help="re-verify a certificate file")
    p.add_argument("cert")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve-norm", help="solve u^2 - n v^2 = b over Q")
    p.add_argument("n")
    p.add_argument("b")
    p.set_defaults(func=cmd_solve_norm)

    p = sub.add_parser("find-slot", help="common slot y of (a2, n2) and (a3, n3)")
    p.add_argument("a2")
    p.add_argument("n2")
    p.add_argument("a3")
    p.add_argument("n3")
    p.set_defaults(func=cmd_find_slot)

    p = sub.add_parser("validate", help="check a scenario file for admissibility")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    return parser


_RAW_ARG_COMMANDS = ("symbols", "solve-norm", "find-slot")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # let negative rationals like -1/2 through argparse untouched
    if argv and argv[0] in _RAW_ARG_COMMANDS and "--" not in argv:
        argv = [argv[0], "--"] + argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)
    try:
        return args.func(args)
    except FormatError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    except (WitnessSearchFailed, SearchExhausted) as ex:
        print(f"search exhausted: {ex}", file=sys.stderr)
        return EXIT_SEARCH
    except AzuliftError as ex:
        print(f"error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    raise SystemExit(main())
