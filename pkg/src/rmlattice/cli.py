"""Command-line front end: generate, principalize, verify, info.

Exit codes: 0 success, 1 I/O or parse or verification failure, 2 violated
hypothesis, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import sys

from .arith import factorize, is_prime
from .errors import InvariantBreach, PreconditionError
from .formats import (
    parse_certificate,
    parse_instance,
    serialize_certificate,
    serialize_instance,
)
from .generator import generate_instance
from .oracle import verify_certificate
from .quadratic import DIVIDES_CONDUCTOR, humbert_nonempty, splitting_type
from .reduction import principalize
from .surface import (
    degree,
    kernel_of_polarization,
    pfaffian,
    stabilizer_order,
    validate,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_HYPOTHESIS = 2
EXIT_BREACH = 3


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_generate(args) -> int:
    primes = []
    if args.degree_primes:
        for part in args.degree_primes.split(","):
            part = part.strip()
            if part:
                try:
                    primes.append(int(part))
                except ValueError:
                    return _fail(f"bad prime {part!r} in --degree-primes", EXIT_IO)
    try:
        surface = generate_instance(args.D, args.conductor, primes, args.seed)
    except PreconditionError as exc:
        return _fail(str(exc), EXIT_HYPOTHESIS)
    except InvariantBreach as exc:
        return _fail(str(exc), EXIT_BREACH)
    try:
        _write(args.out, serialize_instance(surface))
    except OSError as exc:
        return _fail(str(exc), EXIT_IO)
    print(f"wrote instance of degree {degree(surface)} to {args.out}")
    return EXIT_OK


def cmd_principalize(args) -> int:
    try:
        surface = parse_instance(_read(args.instance))
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_IO)
    msg = validate(surface)
    if msg is not None:
        return _fail(f"instance does not validate: {msg}", EXIT_IO)
    try:
        result, report = principalize(surface)
    except PreconditionError as exc:
        return _fail(str(exc), EXIT_HYPOTHESIS)
    except InvariantBreach as exc:
        return _fail(str(exc), EXIT_BREACH)
    try:
        _write(args.out, serialize_instance(result))
        if args.cert_out:
            _write(args.cert_out, serialize_certificate(report))
    except OSError as exc:
        return _fail(str(exc), EXIT_IO)
    print(
        f"principal surface written to {args.out}; degree "
        f"{report.input_summary.degree} -> {report.output_summary.degree}, "
        f"conductor {report.input_summary.conductor} -> "
        f"{report.output_summary.conductor}"
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        surface = parse_instance(_read(args.instance))
        certificate = parse_certificate(_read(args.certificate))
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_IO)
    ok, message = verify_certificate(surface, certificate)
    if not ok:
        return _fail(message, EXIT_IO)
    print(message)
    return EXIT_OK


def cmd_info(args) -> int:
    try:
        surface = parse_instance(_read(args.instance))
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_IO)
    msg = validate(surface)
    if msg is not None:
        return _fail(f"instance does not validate: {msg}", EXIT_IO)
    deg = degree(surface)
    stab = stabilizer_order(surface)
    _, divisors = kernel_of_polarization(surface)
    div_text = "(" + ",".join(str(d) for d in divisors) + ")"
    print(
        f"Δ={surface.order.discriminant} f={stab.conductor} "
        f"deg={deg} divisors={div_text}"
    )
    for q in (sorted(factorize(deg)) if deg > 1 else []):
        if q == 2 or not is_prime(q):
            print(f"{q}: even or composite (unsupported)")
        else:
            kind = splitting_type(surface.order, q)
            label = "divides conductor" if kind == DIVIDES_CONDUCTOR else kind
            print(f"{q}: {label}")
    hum = humbert_nonempty(surface.order.discriminant, abs(pfaffian(surface)))
    print(f"humbert: {'true' if hum else 'false'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmlattice",
        description=(
            "Exact lattice models of polarized abelian surfaces with real "
            "multiplication: generate instances, reduce them to principal "
            "polarizations with maximal order actions, and verify the "
            "resulting certificates."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded instance file")
    g.add_argument("--D", type=int, required=True, help="squarefree field radicand")
    g.add_argument("--conductor", type=int, default=1, help="odd order conductor")
    g.add_argument(
        "--degree-primes",
        default="",
        help="comma list of odd primes; degree becomes their squares' product",
    )
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out", required=True, help="output instance path")
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("principalize", help="run the full reduction pipeline")
    p.add_argument("instance", help="input instance path")
    p.add_argument("-o", "--out", required=True, help="output instance path")
    p.add_argument("--cert-out", help="certificate output path")
    p.set_defaults(func=cmd_principalize)

    v = sub.add_parser("verify", help="replay a certificate against an instance")
    v.add_argument("instance", help="input instance path")
    v.add_argument("certificate", help="certificate path")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("info", help="print invariants of an instance file")
    i.add_argument("instance", help="instance path")
    i.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
