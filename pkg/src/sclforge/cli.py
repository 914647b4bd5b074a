"""Command-line interface.

Exit codes: 0 for pass/HALT, 1 for fail/exhausted verdicts, 2 for usage
errors (bad flags, malformed input files). All numeric output is exact
fractions with fixed-precision decimal columns where tables call for them.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from . import __version__
from .bounds import (
    BoundAtom,
    BoundComm,
    BoundInverse,
    BoundPower,
    BoundProduct,
    SearchConfig,
    cl_search,
    default_budget,
    derive_bound,
    family_scl_bound,
    family_upper_certificate,
    parse_certificate,
    print_certificate,
    scl_report,
    verify_certificate,
)
from .diagrams import (
    DiagramError,
    chi_minus,
    claims_check,
    curvature_report,
    diagram_scl_upper,
    euler_characteristic,
    gauss_bonnet_check,
    parse_diagram,
)
from .presentations import (
    SeqPair,
    check_small_cancellation,
    family_presentation,
    parse_presentation,
    print_presentation,
)
from .rc_numbers import (
    ALL_NUMBERS,
    EMPTY_SET,
    EVEN_NUMBERS,
    ODD_NUMBERS,
    cut_to_monotone,
    decimal_digits,
    oracle_from_list,
    specker_cut,
    specker_partial,
)
from .words import parse_word


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational {text!r}: {exc}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}: {exc}")


def _load_presentation(path: str):
    return parse_presentation(_read(path))


def _oracle(name: str):
    table = {
        "empty": EMPTY_SET,
        "all": ALL_NUMBERS,
        "evens": EVEN_NUMBERS,
        "odds": ODD_NUMBERS,
    }
    if name in table:
        return table[name]
    if name.startswith("list:"):
        return oracle_from_list(_int_list(name[len("list:"):]))
    raise UsageError(f"unknown set {name!r} (use empty|all|evens|odds|list:1,2,3)")


def _log_run(l_override):
    sys.stderr.write(
        f"sclforge {__version__}; l_override={'none' if l_override is None else l_override}\n"
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    ms, ns = _int_list(args.m), _int_list(args.n)
    if len(ms) != args.k or len(ns) != args.k:
        raise UsageError("--m and --n lists must have length --k")
    seq = SeqPair.from_lists(ms, ns)
    pres = family_presentation(seq, args.l_override)
    pres.size = args.k
    pres.family.k = args.k
    _log_run(args.l_override)
    _write(args.output, print_presentation(pres, k=args.k, expand=args.expand))
    return 0


def cmd_check_c16(args) -> int:
    pres = _load_presentation(args.pres)
    _log_run(pres.l_override)
    report = check_small_cancellation(pres, args.k, _fraction(args.lam))
    _write(args.output, report.to_tsv() + "\n")
    return 0 if report.passed else 1


def cmd_rc(args) -> int:
    oracle = _oracle(args.set)
    _log_run(None)
    lines = []
    if args.kind == "specker":
        for i in range(1, args.depth + 1):
            value = specker_partial(oracle, i)
            lines.append(
                f"{i}\t{value.numerator}\t{value.denominator}\t"
                f"{decimal_digits(value)}\t{value.numerator}/{value.denominator}"
            )
    elif args.kind == "cut":
        cut = specker_cut(oracle)
        for i in range(1, args.depth + 1):
            value = cut.rational(i)
            lines.append(
                f"{i}\t{value.numerator}\t{value.denominator}\t"
                f"{decimal_digits(value)}\t{value.numerator}/{value.denominator}"
            )
    else:  # monotone
        mono = cut_to_monotone(specker_cut(oracle))
        for i in range(1, args.depth + 1):
            m, n = mono.pair(i)
            value = mono.value(i)
            lines.append(
                f"{i}\t{m}\t{n}\t{decimal_digits(value)}\t{m}/{n}"
            )
    _write(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_diagram(args) -> int:
    pres = _load_presentation(args.pres)
    _log_run(pres.l_override)
    diag = parse_diagram(_read(args.file), pres.alphabet)
    report = diag.validate(pres)
    if args.kind == "verify":
        if not report.ok:
            _write(args.output, report.to_text() + "\n")
            return 1
        total, chi, _ = gauss_bonnet_check(diag)
        for warning in report.warnings:
            sys.stderr.write(f"warning: {warning}\n")
        _write(args.output, f"valid, chi={chi}, total_curvature={total}\n")
        return 0
    if not report.ok:
        _write(args.output, report.to_text() + "\n")
        return 1
    if args.kind == "chi":
        _write(
            args.output,
            f"chi\t{euler_characteristic(diag)}\nchi_minus\t{chi_minus(diag)}\n",
        )
        return 0
    if args.kind == "curvature":
        _write(args.output, curvature_report(diag, pres).to_tsv() + "\n")
        return 0
    if args.kind == "claims":
        claims = claims_check(diag, pres)
        _write(args.output, claims.to_text() + "\n")
        return 0 if claims.all_ok else 1
    # bound
    try:
        value = diagram_scl_upper(diag)
    except DiagramError as exc:
        _write(args.output, f"not admissible: {exc}\n")
        return 1
    _write(args.output, f"bound\t{value}\t{decimal_digits(value)}\n")
    return 0


def cmd_cert_verify(args) -> int:
    pres = _load_presentation(args.pres)
    _log_run(pres.l_override)
    cert = parse_certificate(_read(args.file), pres.alphabet)
    result = verify_certificate(cert, pres)
    if result.ok:
        _write(args.output, "verified\n")
        return 0
    _write(args.output, f"failed, residue: {result.residue.to_text()}\n")
    return 1


_EXPR_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|-?\d+(?:/\d+)?|[(),]|\S")


def _parse_expr(text: str):
    tokens = _EXPR_TOKEN.findall(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise UsageError(f"bad expression near token {tok!r}")
        pos += 1
        return tok

    def parse():
        head = take()
        if head == "atom":
            take("(")
            name = take()
            take(",")
            bound = _fraction(take())
            take(")")
            return BoundAtom(name, bound)
        if head == "rel":
            take("(")
            name = take()
            take(")")
            return BoundAtom(name, Fraction(0), provenance="CERTIFICATE", group_trivial=True)
        if head == "comm":
            take("(")
            left = take()
            take(",")
            right = take()
            take(")")
            return BoundComm(left, right)
        if head == "pow":
            take("(")
            base = parse()
            take(",")
            exponent = int(take())
            take(")")
            return BoundPower(base, exponent)
        if head == "inv":
            take("(")
            base = parse()
            take(")")
            return BoundInverse(base)
        if head == "prod":
            take("(")
            factors = [parse()]
            while peek() == ",":
                take(",")
                factors.append(parse())
            take(")")
            return BoundProduct(tuple(factors))
        raise UsageError(f"unknown expression head {head!r}")

    expr = parse()
    if peek() is not None:
        raise UsageError(f"trailing expression input {peek()!r}")
    return expr


def cmd_bound_derive(args) -> int:
    _log_run(None)
    expr = _parse_expr(args.expr)
    derivation = derive_bound(expr, cl_half=args.half_rule)
    _write(args.output, derivation.render() + f"\nbound\t{derivation.bound}\n")
    return 0


def cmd_bound_family(args) -> int:
    cl_half = not args.no_half_rule
    value, derivation = family_scl_bound(args.m, args.n, args.index, cl_half=cl_half)
    pres = None
    if args.pres:
        pres = _load_presentation(args.pres)
    _log_run(pres.l_override if pres else args.l_override)
    lines = [derivation.render(), f"bound\t{value}\t{decimal_digits(value)}"]
    if pres is None and args.emit_certificate:
        raise UsageError("--emit-certificate needs --pres")
    if pres is not None:
        cert = family_upper_certificate(args.m, args.n, args.index, pres)
        verified = verify_certificate(cert, pres)
        lines.append(f"certificate\t{'verified' if verified.ok else 'FAILED'}")
        if args.emit_certificate:
            _write(args.emit_certificate, print_certificate(cert))
        if not verified.ok:
            _write(args.output, "\n".join(lines) + "\n")
            return 1
    _write(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_cl_search(args) -> int:
    pres = _load_presentation(args.pres)
    _log_run(pres.l_override)
    word = parse_word(pres.alphabet, args.word)
    cfg = SearchConfig(
        max_word_length=args.max_len,
        max_commutators=args.max_commutators,
        max_relator_factors=args.max_relfac,
        max_relator_index=args.max_index,
        workers=args.workers,
        budget=args.budget,
    )
    result = cl_search(pres, word, args.power, _fraction(args.q), cfg)
    for warning in result.warnings:
        sys.stderr.write(f"warning: {warning}\n")
    if result.halted():
        _write(args.output, print_certificate(result.certificate))
        sys.stderr.write(f"HALT after {result.steps} candidates\n")
        return 0
    sys.stderr.write(f"BUDGET_EXHAUSTED after {result.steps} candidates\n")
    return 1


def cmd_report(args) -> int:
    if args.pres:
        pres = _load_presentation(args.pres)
        if pres.family is None:
            raise UsageError("report needs a family presentation")
    else:
        if not (args.m and args.n and args.k):
            raise UsageError("report needs --pres or all of --m, --n, --k")
        ms, ns = _int_list(args.m), _int_list(args.n)
        pres = family_presentation(SeqPair.from_lists(ms, ns), args.l_override)
        pres.size = args.k
        pres.family.k = args.k
    _log_run(pres.l_override)
    k = args.k or pres.size
    if k is None:
        raise UsageError("report needs --k")
    diagrams = []
    for path in args.diagram or []:
        diag = parse_diagram(_read(path), pres.alphabet)
        if not diag.validate(pres).ok:
            raise UsageError(f"diagram {path} does not validate")
        diagrams.append(diag)
    report = scl_report(pres, k, diagrams)
    _write(args.output, report.to_tsv() + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sclforge",
        description="exact certificates and diagram checks for commutator-length bounds",
    )
    parser.add_argument("--version", action="version", version=f"sclforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a relator-family presentation file")
    p.add_argument("--m", required=True, help="comma-separated numerators")
    p.add_argument("--n", required=True, help="comma-separated denominators")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l-override", type=int, default=None, dest="l_override")
    p.add_argument("--expand", action="store_true", help="emit rel: lines instead of a family: line")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check-c16", help="check the small-cancellation condition")
    p.add_argument("--pres", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lam", default="1/6")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_check_c16)

    p = sub.add_parser("rc", help="rational approximation streams (TSV)")
    p.add_argument("kind", choices=["specker", "cut", "monotone"])
    p.add_argument("--set", required=True, help="empty|all|evens|odds|list:1,2,3")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_rc)

    p = sub.add_parser("diagram", help="verify and measure surface diagrams")
    p.add_argument("kind", choices=["verify", "chi", "curvature", "claims", "bound"])
    p.add_argument("file")
    p.add_argument("--pres", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("cert", help="certificate operations")
    certsub = p.add_subparsers(dest="certcmd", required=True)
    pv = certsub.add_parser("verify")
    pv.add_argument("file")
    pv.add_argument("--pres", required=True)
    pv.add_argument("-o", "--output", default=None)
    pv.set_defaults(func=cmd_cert_verify)

    p = sub.add_parser("bound", help="bound calculus")
    boundsub = p.add_subparsers(dest="boundcmd", required=True)
    pd = boundsub.add_parser("derive")
    pd.add_argument("--expr", required=True, help="e.g. prod(comm(g,h), pow(atom(g, 1/2), 3))")
    pd.add_argument("--half-rule", action="store_true")
    pd.add_argument("-o", "--output", default=None)
    pd.set_defaults(func=cmd_bound_derive)
    pf = boundsub.add_parser("family")
    pf.add_argument("--m", type=int, required=True)
    pf.add_argument("--n", type=int, required=True)
    pf.add_argument("--index", "-N", type=int, required=True)
    pf.add_argument("--no-half-rule", action="store_true")
    pf.add_argument("--pres", default=None, help="verify the certificate against this file")
    pf.add_argument("--emit-certificate", default=None)
    pf.add_argument("--l-override", type=int, default=None, dest="l_override")
    pf.add_argument("-o", "--output", default=None)
    pf.set_defaults(func=cmd_bound_family)

    p = sub.add_parser("cl-search", help="bounded certificate search")
    p.add_argument("--pres", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--power", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--max-len", type=int, default=2)
    p.add_argument("--max-commutators", type=int, default=8)
    p.add_argument("--max-relfac", type=int, default=0)
    p.add_argument("--max-index", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int, default=default_budget())
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_cl_search)

    p = sub.add_parser("report", help="table of certified upper bounds")
    p.add_argument("--pres", default=None)
    p.add_argument("--m", default=None)
    p.add_argument("--n", default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--l-override", type=int, default=None, dest="l_override")
    p.add_argument("--diagram", action="append", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
