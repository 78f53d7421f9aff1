"""Command line interface.

Exit codes: 0 for YES / ACCEPT / success, 1 for MAYBE / REJECT, 2 for input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certificate import verify_certificate
from .frontend import AfsCheckError, AfsSyntaxError, parse_afs, parse_term, print_term
from .hopoly import UnsupportedOrder
from .rewriting import FuelExhausted, normalize
from .search import Certificate, SearchConfig, find_interpretation
from .syntax import TypingError, infer

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    try:
        return parse_afs(text)
    except AfsSyntaxError as e:
        raise InputError(f"{path}: syntax error at {e}") from None
    except AfsCheckError as e:
        raise InputError(f"{path}: {e}") from None


def cmd_check(args, out) -> int:
    afs = _load(args.file)
    cfg = SearchConfig(
        max_coeff=args.max_coeff,
        degree=args.degree,
        allow_fun_args=not args.no_fun_args,
        timeout=args.timeout,
        parallelism=args.jobs or SearchConfig().parallelism,
    )
    try:
        result = find_interpretation(afs, cfg)
    except UnsupportedOrder as e:
        print("MAYBE", file=out)
        print(f"unsupported: {e}", file=out)
        return EXIT_NEGATIVE
    if isinstance(result, Certificate):
        text = result.to_text()
        print("YES", file=out)
        out.write(text)
        if args.cert:
            Path(args.cert).write_text(text)
        return EXIT_OK
    print("MAYBE", file=out)
    print(str(result), file=out)
    return EXIT_NEGATIVE


def cmd_verify(args, out) -> int:
    afs = _load(args.file)
    try:
        text = Path(args.cert).read_text()
    except OSError as e:
        raise InputError(f"{args.cert}: {e.strerror}") from None
    res = verify_certificate(afs, text)
    print(str(res), file=out)
    return EXIT_OK if res.accepted else EXIT_NEGATIVE


def cmd_normalize(args, out) -> int:
    afs = _load(args.file)
    try:
        t = parse_term(args.term, afs.sig)
        infer(afs.sig, (), t)
    except AfsSyntaxError as e:
        raise InputError(f"--term: {e}") from None
    except TypingError as e:
        raise InputError(f"--term: {e}") from None
    reserved = set(afs.sig.ar)
    try:
        nf, trace = normalize(afs, t, args.fuel)
    except FuelExhausted as e:
        print("FUEL EXHAUSTED", file=out)
        print(f"after {len(e.trace)} steps: {print_term(e.term, reserved=reserved)}", file=out)
        return EXIT_NEGATIVE
    print(print_term(nf, reserved=reserved), file=out)
    for k, step in enumerate(trace, 1):
        print(f"  {k}. {step.describe()} -> {print_term(step.result, reserved=reserved)}", file=out)
    return EXIT_OK


def cmd_typecheck(args, out) -> int:
    afs = _load(args.file)
    reserved = set(afs.sig.ar)
    for i, rule in enumerate(afs.rules):
        names = list(rule.names)
        lhs = print_term(rule.lhs, names, reserved)
        rhs = print_term(rule.rhs, names, reserved)
        print(f"rule {i}: {lhs} => {rhs} : {rule.type}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="afsterm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="search for a termination certificate")
    c.add_argument("file")
    c.add_argument("--degree", type=int, default=2)
    c.add_argument("--max-coeff", type=int, default=3)
    c.add_argument("--timeout", type=float, default=10.0)
    c.add_argument("--cert", help="also write the certificate to this file")
    c.add_argument("--jobs", type=int, default=0, help="worker processes (default: all cores)")
    c.add_argument("--no-fun-args", action="store_true", help="only constant arguments inside F(...)")
    c.set_defaults(run=cmd_check)

    v = sub.add_parser("verify", help="check a certificate independently")
    v.add_argument("file")
    v.add_argument("--cert", required=True)
    v.set_defaults(run=cmd_verify)

    n = sub.add_parser("normalize", help="rewrite a closed term to normal form")
    n.add_argument("file")
    n.add_argument("--term", required=True)
    n.add_argument("--fuel", type=int, default=10_000)
    n.set_defaults(run=cmd_normalize)

    t = sub.add_parser("typecheck", help="print the type of every rule")
    t.add_argument("file")
    t.set_defaults(run=cmd_typecheck)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.run(args, out)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
