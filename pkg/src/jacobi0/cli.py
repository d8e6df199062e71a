"""Command-line interface: ``jacobi0 <command> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on a usage
error (bad rationals, Im(tau) <= 0, unknown suite or form).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from fractions import Fraction
from typing import Any, Callable

from jacobi0 import __version__
from jacobi0.analysis import (
    ContourError,
    CuspOrderViolation,
    TorusContour,
    count_zeros,
    cusp_order_bound,
    embed_g,
)
from jacobi0.jacobi import (
    ExceedsWindow,
    ModifiedJacobiForm,
    UnimodularMatrix,
    constant_form,
    filtration_index,
    sigma_form,
    slash_dprime,
    slash_prime,
)
from jacobi0.klein import (
    CongruenceCondition,
    check_phix_modularity,
    klein_eval,
    klein_qexp,
    phi_X,
    phi_X_eval,
    subgroup_member,
)
from jacobi0.qseries import bs_support_profile, qs_ord
from jacobi0.verify import SUITES, run_suite
from jacobi0.weierstrass import RationalPair

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PRECISION_ENV = "JACOBI0_PRECISION"

FORMS: dict[str, Callable[[int], ModifiedJacobiForm]] = {
    "sigma": sigma_form,
    "sigma2": lambda trunc: _relabel(sigma_form(trunc) * sigma_form(trunc), "sigma^2"),
    "const": lambda trunc: constant_form(1, trunc),
}

DEFAULT_EMBED_X = {
    "sigma": ("1/2,1/2", "1/3,2/3"),
    "sigma2": ("1/2,1/2", "1/3,2/3", "1/4,1/5"),
}


class UsageError(ValueError):
    pass


def _relabel(phi: ModifiedJacobiForm, label: str) -> ModifiedJacobiForm:
    return ModifiedJacobiForm(phi.weight, phi.evaluator, phi.normalized_series, phi.series_scale, label)


# ---------------------------------------------------------------- parsing

def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` style input: ``i``, ``2i``, ``0.5+i``, ``-0.15+0.05i``, ``0.1``."""
    s = text.strip().replace(" ", "").replace("j", "i")
    if not s:
        raise ValueError("empty complex number")
    if s.endswith("i") and not re.search(r"\d[+-]", s[1:]):
        # pure imaginary: i, -i, 2i, 0.3i
        coef = s[:-1]
        if coef in ("", "+"):
            return 1j
        if coef == "-":
            return -1j
        return complex(0, float(coef))
    m = re.fullmatch(r"([+-]?[\d.]+(?:e[+-]?\d+)?)(?:([+-])([\d.]*(?:e[+-]?\d+)?)i)?", s)
    if not m:
        raise ValueError(f"cannot parse complex number {text!r}")
    re_part = float(m.group(1))
    im_part = 0.0
    if m.group(2):
        mag = float(m.group(3)) if m.group(3) else 1.0
        im_part = mag if m.group(2) == "+" else -mag
    return complex(re_part, im_part)


def _tau_arg(text: str) -> complex:
    try:
        tau = parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if tau.imag <= 0:
        raise argparse.ArgumentTypeError(f"Im(tau) must be positive, got {text!r}")
    return tau


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair_arg(text: str) -> RationalPair:
    try:
        return RationalPair.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational pair {text!r}: {exc}") from None


def _matrix_arg(text: str) -> UnimodularMatrix:
    try:
        return UnimodularMatrix.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("tolerance must be a positive finite number")
    return v


def parse_grid(text: str | None) -> tuple[complex, ...] | None:
    """``default`` keeps the built-in tau grid; otherwise ``;``-separated tau values."""
    if text is None or text == "default":
        return None
    taus = tuple(_tau_arg(t) for t in text.split(";") if t.strip())
    if not taus:
        raise argparse.ArgumentTypeError("empty grid")
    return taus


# ---------------------------------------------------------------- output

def _canon(obj: Any) -> str:
    """JSON with floats written to 17 significant digits, keys in insertion order."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    if isinstance(obj, complex):
        return _canon([obj.real, obj.imag])
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_canon(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_canon(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return _canon(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return _canon(obj)


def _csv_rows(obj: Any) -> list[dict]:
    if isinstance(obj, dict) and isinstance(obj.get("terms"), list):
        return obj["terms"]
    if isinstance(obj, list) and all(isinstance(o, dict) for o in obj):
        return obj
    if isinstance(obj, dict):
        return [{"key": k, "value": v} for k, v in obj.items()]
    return [{"value": obj}]


def _csv_cell(v: Any) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple, dict, complex)):
        return dumps(v)
    return str(v)


def render(obj: Any, mode: str, pretty_lines: list[str] | None = None) -> str:
    if mode == "json":
        return dumps(obj)
    if mode == "csv":
        rows = _csv_rows(obj)
        buf = io.StringIO()
        header: list[str] = []
        for row in rows:
            header.extend(k for k in row if k not in header)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_csv_cell(row.get(k, "")) for k in header])
        return buf.getvalue().rstrip("\n")
    if pretty_lines is not None:
        return "\n".join(pretty_lines)
    return json.dumps(json.loads(dumps(obj)), indent=2)


# ---------------------------------------------------------------- commands

def _form(args) -> ModifiedJacobiForm:
    return FORMS[args.form](args.trunc)


def _tolerance(args, default: float | None) -> float | None:
    if args.tol is not None:
        return args.tol
    env = os.environ.get(PRECISION_ENV)
    if env:
        try:
            return _positive_float(env)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{PRECISION_ENV}: {exc}") from None
    return default


def cmd_expand(args):
    phi = _form(args)
    out = phi.normalized_series.to_json()
    out["weight"] = phi.weight
    out["scale"] = [complex(phi.series_scale).real, complex(phi.series_scale).imag]
    return out, EXIT_OK, None


def cmd_eval(args):
    phi = _form(args)
    f = phi.evaluator
    for M in args.matrix or ():
        f = slash_prime(f, phi.weight, M)
    for X in args.X or ():
        f = slash_dprime(f, phi.weight, X)
    zs = args.z or [0.1 + 0j]
    rows = [{"tau": args.tau, "z": z, "value": complex(f(args.tau, z))} for z in zs]
    lines = [f"{phi.label}(tau={args.tau}, z={r['z']}) = {r['value']}" for r in rows]
    return rows, EXIT_OK, lines


def cmd_klein(args):
    if not args.X:
        raise UsageError("klein needs at least one --X")
    out = []
    for X in args.X:
        series = klein_qexp(X, args.trunc)
        entry = {"X": str(X), "ord": str(qs_ord(series)), "series": series.to_json()}
        if args.tau is not None:
            prod, ser = klein_eval(X, args.tau), series.evaluate(args.tau)
            entry.update(tau=args.tau, product=prod, qexp=ser, deviation=abs(prod - ser))
        out.append(entry)
    return out, EXIT_OK, None


def cmd_phix(args):
    if not args.X:
        raise UsageError("phix needs at least one --X")
    phi = _form(args)
    tol = _tolerance(args, 1e-8)
    out = []
    status = EXIT_OK
    taus = args.grid
    if taus is None and args.tau is not None:
        taus = (args.tau,)
    for X in args.X:
        series = phi_X(phi, X)
        entry: dict = {"X": str(X), "k": phi.weight, "ord": str(qs_ord(series)), "series": series.to_json()}
        if args.matrix:
            cond = CongruenceCondition(X, phi.weight)
            members = [M for M in args.matrix if subgroup_member(cond, M)]
            entry["matrices"] = [{"matrix": str(M), "member": M in members} for M in args.matrix]
            if members:
                rep = check_phix_modularity(phi, X, members, taus or (1j, 2j, 0.5 + 1j, 1 / 3 + 2j), tol)
                entry["report"] = rep.to_json()
                if not rep.passed:
                    status = EXIT_FAIL
        elif args.tau is not None:
            entry["tau"] = args.tau
            entry["value"] = phi_X_eval(phi, X, args.tau)
        out.append(entry)
    return out, status, None


def cmd_verify(args):
    name = args.suite_pos or args.suite or "all"
    if name != "all" and name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    reports = run_suite(name, _tolerance(args, None), args.grid)
    status = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    return [r.to_json() for r in reports], status, [r.line() for r in reports]


def cmd_zeros(args):
    phi = _form(args)
    tau = args.tau if args.tau is not None else 1j
    contour = TorusContour(tau, args.z0) if args.z0 is not None else TorusContour(tau)
    try:
        rep = count_zeros(lambda z: phi(tau, z), contour)
    except ContourError as exc:
        return {"error": str(exc)}, EXIT_FAIL, None
    out = rep.to_json()
    return out, EXIT_OK if rep.count == -phi.weight else EXIT_FAIL, None


def cmd_classify(args):
    phi = _form(args)
    prof = bs_support_profile(phi.normalized_series)
    out = {"form": phi.label, "weight": phi.weight, "trunc": phi.normalized_series.N,
           "gaps": list(prof.gaps()), "cusp_order_bound": str(cusp_order_bound(phi))}
    try:
        out["filtration_index"] = filtration_index(phi)
    except ExceedsWindow as exc:
        out["filtration_index"] = None
        out["reason"] = str(exc)
        return out, EXIT_FAIL, None
    return out, EXIT_OK, None


def cmd_embed(args):
    phi = _form(args)
    xs = args.X or [RationalPair.parse(t) for t in DEFAULT_EMBED_X.get(args.form, ())]
    m = args.m
    if m is None:
        m = filtration_index(phi)
    try:
        comps = embed_g(phi, xs, m)
    except CuspOrderViolation as exc:
        return {"error": str(exc)}, EXIT_FAIL, None
    out = [{"X": str(X), "m": m, "weight": phi.weight + 12 * m, "ord": str(qs_ord(c)), "series": c.to_json()}
           for X, c in zip(xs, comps)]
    return out, EXIT_OK, None


COMMANDS = {
    "expand": cmd_expand, "eval": cmd_eval, "klein": cmd_klein, "phix": cmd_phix,
    "verify": cmd_verify, "zeros": cmd_zeros, "classify": cmd_classify, "embed": cmd_embed,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc", type=_positive_int, default=12, help="q-truncation order N (default 12)")
    common.add_argument("--tol", type=_positive_float, default=None,
                        help=f"tolerance (default per check, or ${PRECISION_ENV})")
    common.add_argument("--tau", type=_tau_arg, default=None, help="tau as a+bi, e.g. i, 2i, 0.5+i")
    common.add_argument("--z", type=_complex_arg, action="append", help="z value (repeatable)")
    common.add_argument("--X", type=_pair_arg, action="append", help="rational index 'p/q,r/s' (repeatable)")
    common.add_argument("--matrix", type=_matrix_arg, action="append", help="SL2(Z) matrix 'a,b,c,d' (repeatable)")
    common.add_argument("--grid", type=parse_grid, default=None, help="'default' or tau list 'i;2i;0.5+i'")
    common.add_argument("--output", choices=("json", "csv", "pretty"), default="json")
    common.add_argument("--suite", default=None, help="verification suite name")
    common.add_argument("--z0", type=_complex_arg, default=None, help="base corner of the zero-count contour")
    common.add_argument("--m", type=_positive_int, default=None, help="Delta power for embed")

    p = argparse.ArgumentParser(prog="jacobi0", description="Modified Jacobi forms of index zero.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    form_kw = dict(choices=sorted(FORMS), help="form: " + ", ".join(sorted(FORMS)))
    for name in ("expand", "eval", "phix", "classify", "embed"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("form", nargs="?" if name != "expand" else None, default="sigma", **form_kw)
    sub.add_parser("klein", parents=[common])
    sp = sub.add_parser("verify", parents=[common])
    sp.add_argument("suite_pos", nargs="?", default=None, metavar="SUITE",
                    help="one of " + ", ".join(SUITES) + ", all")
    sp = sub.add_parser("zeros", parents=[common])
    sp.add_argument("--form", choices=sorted(FORMS), default="sigma")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "eval" and args.tau is None:
        print("jacobi0 eval: --tau is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        obj, status, lines = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"jacobi0 {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(obj, args.output, lines) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
