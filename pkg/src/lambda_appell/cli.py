"""Command line interface.

Every command prints one JSON document.  Exit status is 0 on success, 1 for
domain errors (non-lowering operator, truncation, failed precondition) and 2
for malformed input.  Rationals are always printed as ``"p/q"`` strings.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .analysis import laguerre_characterization, nonexistence_certificate
from .cubic import decompose, secondary_profile, verify_nine_relations, verify_principal_appell
from .errors import LambdaAppellError
from .exactmath import Polynomial, as_rational, format_rational
from .functionals import DEFAULT_MOMENTS, MomentFunctional, apply_transpose, dual_sequence
from .sequences import (
    build_lambda_appell,
    dual_appell_check,
    is_lambda_appell,
    is_orthogonal,
    parse_sequence,
    structure_coefficients,
)
from .weyl import LambdaCoeffs, convert, is_lowering_operator, lambda_operator, parse_operator


class InputError(Exception):
    """Malformed command line or payload (exit status 2)."""


def _rationals(text: str) -> list:
    try:
        return [as_rational(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational list {text!r}: {exc}") from exc


def _rational(text: str):
    try:
        return as_rational(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}") from exc


def _load_json(text: str):
    """Inline JSON, ``-`` for standard input, or ``@path``."""
    try:
        if text == "-":
            return json.load(sys.stdin)
        if text.startswith("@"):
            with open(text[1:]) as fh:
                return json.load(fh)
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON input: {exc}") from exc


def _operator(args) -> LambdaCoeffs:
    if getattr(args, "operator", None):
        spec = _load_json(args.operator)
    else:
        if args.coeffs is None:
            raise InputError("give --coeffs or --operator")
        spec = {"basis": args.basis, "coeffs": [format_rational(v) for v in _rationals(args.coeffs)]}
    try:
        return parse_operator(spec)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"bad operator description: {exc}") from exc


def _sequence(args):
    spec = _load_json(args.sequence)
    try:
        return parse_sequence(spec)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"bad sequence description: {exc}") from exc


def _polys(ps) -> list:
    return [p.to_json() for p in ps]


# -- commands -----------------------------------------------------------------


def cmd_convert_operator(args):
    a = _operator(args)
    target = args.to or ("xd" if args.basis == "dx" else "dx")
    return convert(a, target)


def cmd_check_lowering(args):
    return is_lowering_operator(_operator(args)).to_json()


def cmd_apply_operator(args):
    a = _operator(args)
    L = lambda_operator(a)
    if args.form is not None:
        u = MomentFunctional(tuple(_rationals(args.form)))
        return {"form": apply_transpose(L, u).to_json()}
    if args.poly is None:
        raise InputError("give --poly or --form")
    return {"result": L(Polynomial(_rationals(args.poly))).to_json()}


def cmd_build_appell(args):
    a = _operator(args)
    consts = None
    if args.constants:
        consts = [0] + _rationals(args.constants)
    B = build_lambda_appell(a, consts)
    return {"coeffs": a.to_json(), "polys": _polys(B.polys(args.upto))}


def cmd_check_appell(args):
    a = _operator(args)
    B = _sequence(args)
    out = {"coeffs": a.to_json(), **is_lambda_appell(B, a, args.upto).to_json()}
    if args.dual:
        out["dual"] = dual_appell_check(B, a, min(args.upto, args.moments - 1), args.moments).to_json()
    return out


def cmd_dual_sequence(args):
    B = _sequence(args)
    duals = dual_sequence(B, args.count, args.moments)
    return {"forms": [u.to_json() for u in duals]}


def cmd_decompose_cubic(args):
    return decompose(_sequence(args), args.upto).to_json()


def cmd_verify_cd_relations(args):
    d = decompose(_sequence(args), args.upto)
    res = verify_nine_relations(d)
    failures = [r.to_json() for r in res if not r.ok]
    out = {"all_zero": not failures, "checked": len(res), "failures": failures}
    if args.principal:
        out["principal"] = verify_principal_appell(d).to_json()
    return out


def cmd_secondary_coeffs(args):
    return secondary_profile(decompose(_sequence(args), args.upto)).to_json()


def cmd_verify_nonexistence(args):
    a = LambdaCoeffs((_rational(args.a0), _rational(args.a1), _rational(args.a2)))
    return nonexistence_certificate(a).to_json()


def cmd_laguerre_check(args):
    a = LambdaCoeffs((_rational(args.a0), _rational(args.a1)))
    return laguerre_characterization(a, _rational(args.beta0), args.order).to_json()


def cmd_structure_coeffs(args):
    B = _sequence(args)
    out = structure_coefficients(B, args.upto).to_json()
    out["orthogonality"] = is_orthogonal(B, max(args.upto, 2)).to_json()
    return out


COMMANDS = {
    "convert-operator": cmd_convert_operator,
    "check-lowering": cmd_check_lowering,
    "apply-operator": cmd_apply_operator,
    "build-appell": cmd_build_appell,
    "check-appell": cmd_check_appell,
    "dual-sequence": cmd_dual_sequence,
    "decompose-cubic": cmd_decompose_cubic,
    "verify-cd-relations": cmd_verify_cd_relations,
    "secondary-coeffs": cmd_secondary_coeffs,
    "verify-nonexistence": cmd_verify_nonexistence,
    "laguerre-check": cmd_laguerre_check,
    "structure-coeffs": cmd_structure_coeffs,
}


def _global_flags(parser, defaults: bool):
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--moments", "--max-degree", dest="moments", type=int,
                        default=d(DEFAULT_MOMENTS), help="truncation bound (default 64)")
    parser.add_argument("--output", choices=("json", "pretty"), default=d("json"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambda-appell", description=__doc__.splitlines()[0])
    _global_flags(parser, True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, operator=False, sequence=False, upto=None):
        p = sub.add_parser(name, help=help_, parents=[common])
        if operator:
            p.add_argument("--coeffs", help="comma separated coefficients, lowest index first")
            p.add_argument("--basis", choices=("dx", "xd"), default="dx")
            p.add_argument("--operator", help="JSON operator description, '-' or @file")
        if sequence:
            p.add_argument("--sequence", required=True, help="JSON sequence descriptor, '-' or @file")
        if upto is not None:
            p.add_argument("--upto", type=int, default=upto)
        return p

    p = add("convert-operator", "change basis of a Lambda operator", operator=True)
    p.add_argument("--to", choices=("dx", "xd", "factored"))
    add("check-lowering", "test whether Lambda is a lowering operator", operator=True)
    p = add("apply-operator", "apply Lambda to a polynomial or its transpose to a form", operator=True)
    p.add_argument("--poly", help="polynomial coefficients, constant term first")
    p.add_argument("--form", help="moments of a form")
    p = add("build-appell", "build a Lambda-Appell sequence", operator=True, upto=10)
    p.add_argument("--constants", help="constant terms of B_1, B_2, ...")
    p = add("check-appell", "test the Lambda-Appell property", operator=True, sequence=True, upto=20)
    p.add_argument("--dual", action="store_true", help="also check the dual sequence relations")
    p = add("dual-sequence", "moments of the dual sequence", sequence=True)
    p.add_argument("--count", type=int, default=4)
    add("decompose-cubic", "cubic decomposition matrices M_n", sequence=True, upto=5)
    p = add("verify-cd-relations", "residuals of the nine Appell coupling relations",
            sequence=True, upto=10)
    p.add_argument("--principal", action="store_true", help="also check the principal operators")
    add("secondary-coeffs", "thresholds and leading coefficients of the secondary components",
        sequence=True, upto=10)
    p = add("verify-nonexistence", "k = 2 elimination certificate")
    for flag in ("--a0", "--a1", "--a2"):
        p.add_argument(flag, required=True)
    p = add("laguerre-check", "k = 1 Laguerre characterization")
    for flag in ("--a0", "--a1", "--beta0"):
        p.add_argument(flag, required=True)
    p.add_argument("--order", type=int, default=25)
    add("structure-coeffs", "structure coefficients and orthogonality", sequence=True, upto=10)
    return parser


_NEG_VALUE = re.compile(r"^-[\d./]")


def normalize_argv(argv: list) -> list:
    """Glue negative values to their flag (``--coeffs -2,1`` -> ``--coeffs=-2,1``)."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEG_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _emit(doc, style: str, stream):
    if style == "pretty":
        stream.write(json.dumps(doc, indent=2) + "\n")
    else:
        stream.write(json.dumps(doc, separators=(",", ":")) + "\n")


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(normalize_argv(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc = COMMANDS[args.command](args)
    except InputError as exc:
        _emit({"error": str(exc), "kind": "input"}, args.output, stdout)
        return 2
    except LambdaAppellError as exc:
        err = {"error": str(exc), "kind": type(exc).__name__}
        if getattr(exc, "witness", None) is not None:
            err["witness"] = exc.witness
        _emit(err, args.output, stdout)
        return 1
    _emit(doc, args.output, stdout)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
