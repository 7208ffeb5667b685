"""Command-line front end.

Exit codes: 0 when every selected check passes, 1 on a mathematical
mismatch, 2 on usage or parameter errors (poles, divergence, unknown ids).
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Sequence

from .errors import NonConvergent, PoleProximity, SingularSeries, UnknownIdentity, UnknownPair, UnknownSeries
from .identities import (
    F1_VARIANTS,
    REGISTRY,
    VerificationReport,
    f1_expr,
    f2_expr,
    f_expr,
    get_identity,
    theta_a_expr,
    theta_psi_expr,
    verify,
)
from .qseries import Coefficient, QMonomial, QSeries, qm
from .wppairs import DERIVED_IDS, PAIR_IDS, catalog_pair, wp_check

MIN_ORDER = 4
DEFAULT_ORDER = 40

PARAM_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)=\[(-?\d+)/(\d+),(-?\d+)/(\d+)\]q\^(-?\d+)$")

OPERATIONAL_ERRORS = (
    SingularSeries,
    NonConvergent,
    PoleProximity,
    UnknownIdentity,
    UnknownPair,
    UnknownSeries,
    ValueError,
    TypeError,
)

SERIES = ("psi", "a_of_q", "f1", "f2", "f")


class UsageError(Exception):
    pass


def parse_param(text: str) -> tuple[str, QMonomial]:
    """``name=[re_num/re_den,im_num/im_den]q^expo`` -> ``(name, QMonomial)``."""
    m = PARAM_RE.match(text.strip())
    if not m:
        raise UsageError(f"malformed parameter {text!r}; expected name=[p/q,r/s]q^e")
    name, rn, rd, im_n, im_d, expo = m.groups()
    if int(rd) == 0 or int(im_d) == 0:
        raise UsageError(f"zero denominator in {text!r}")
    coeff = Coefficient(Fraction(int(rn), int(rd)), Fraction(int(im_n), int(im_d)))
    if not coeff:
        raise UsageError(f"parameter {name} must be nonzero")
    return name, QMonomial(coeff, int(expo))


def parse_params(items: Sequence[str] | None) -> dict[str, QMonomial]:
    out = {}
    for item in items or ():
        name, value = parse_param(item)
        out[name] = value
    return out


def parse_point(text: str) -> complex:
    try:
        z = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse evaluation point {text!r}") from None
    if abs(z) >= 1:
        raise UsageError("numeric mode needs |q| < 1")
    return z


def _fraction_text(x: Fraction) -> str:
    return str(x)


def _pair_of(c) -> list:
    if isinstance(c, Coefficient):
        return [_fraction_text(c.re), _fraction_text(c.im)]
    c = complex(c)
    return [c.real, c.imag]


def report_json(report: VerificationReport | None, ident: str, backend: str, order, error: str | None = None) -> dict:
    if report is None:
        return {
            "id": ident,
            "backend": backend,
            "order": order,
            "outcome": "error",
            "first_mismatch": None,
            "millis": None,
            "error": error,
        }
    mismatch = None
    if report.first_mismatch is not None:
        fm = report.first_mismatch
        mismatch = {"exponent": fm["exponent"], "lhs": _pair_of(fm["lhs"]), "rhs": _pair_of(fm["rhs"])}
        if "difference" in fm:
            mismatch["difference"] = fm["difference"]
    return {
        "id": report.id,
        "backend": report.backend,
        "order": report.order if report.backend == "exact" else [report.point.real, report.point.imag],
        "outcome": report.outcome,
        "first_mismatch": mismatch,
        "millis": round(report.millis, 3),
    }


def report_text(row: dict) -> str:
    order = row["order"]
    if isinstance(order, list):
        order = f"q={complex(*order)}"
    verdict = row["outcome"].upper()
    detail = ""
    if row["outcome"] == "error":
        detail = row["error"]
    elif row["first_mismatch"] is not None:
        fm = row["first_mismatch"]
        if fm["exponent"] is None:
            detail = f"|lhs-rhs|={fm['difference']:.3e}"
        else:
            lhs, rhs = fm["lhs"], fm["rhs"]
            detail = f"q^{fm['exponent']}: lhs={lhs[0]}+{lhs[1]}i rhs={rhs[0]}+{rhs[1]}i"
    elif row["millis"] is not None:
        detail = f"{row['millis']:.1f}ms"
    return f"{row['id']} {row['backend']} {order} {verdict} {detail}".rstrip()


def _emit(lines: list[str], args) -> None:
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _describe_error(exc: BaseException) -> str:
    name = type(exc).__name__
    msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
    return f"{name}: {msg}"


def cmd_verify(args) -> int:
    params = parse_params(args.param)
    ids = list(REGISTRY) if args.id == "all" else [args.id]
    if args.id != "all":
        try:
            get_identity(args.id)
        except UnknownIdentity as exc:
            print(f"{args.id}: {_describe_error(exc)}", file=sys.stderr)
            return 2
    q0 = parse_point(args.q) if args.backend == "numeric" else None
    rows = []
    for ident in ids:
        entry = REGISTRY[ident]
        order = args.order if args.order is not None else entry.order
        own = {k: v for k, v in params.items() if k in entry.default_params or k in ("rho1", "rho2")}
        if args.id != "all":
            own = params
        pair = args.pair if entry.pair_kind is not None else None
        if pair is not None and entry.pair_kind == "pair" and pair.endswith("*"):
            pair = pair[:-1]
        if pair is not None and entry.pair_kind == "derived" and not pair.endswith("*"):
            pair = pair + "*"
        try:
            report = verify(ident, own, order, args.backend, q0 if q0 is not None else 0.3, pair)
            row = report_json(report, ident, args.backend, order)
        except OPERATIONAL_ERRORS as exc:
            detail = _describe_error(exc)
            print(f"{ident}: {detail}", file=sys.stderr)
            row = report_json(None, ident, args.backend, order if args.backend == "exact" else None, detail)
        rows.append(row)
    if args.format == "json":
        _emit([json.dumps(rows if args.id == "all" else rows[0], indent=2)], args)
    else:
        _emit([report_text(r) for r in rows], args)
    outcomes = {r["outcome"] for r in rows}
    if "error" in outcomes:
        return 2
    if "fail" in outcomes:
        return 1
    return 0


def cmd_list(args) -> int:
    lines = []
    if args.what in ("identities", "all"):
        for entry in REGISTRY.values():
            extra = f" [{entry.pair_kind}: default {entry.default_pair}]" if entry.pair_kind else ""
            lines.append(f"{entry.id}\tN={entry.order}\t{entry.description}{extra}")
    if args.what in ("pairs", "all"):
        for pid in PAIR_IDS:
            lines.append(f"pair {pid}")
        for pid in DERIVED_IDS:
            lines.append(f"derived {pid}")
    if args.format == "json":
        _emit([json.dumps(lines, indent=2)], args)
    else:
        _emit(lines, args)
    return 0


def _need(params: dict, *names: str) -> list[QMonomial]:
    missing = [n for n in names if n not in params]
    if missing:
        raise UsageError(f"missing parameter(s): {', '.join(missing)}")
    return [params[n] for n in names]


def build_series(name: str, params: dict, base: int, variant: str):
    if name == "psi":
        return theta_psi_expr(base, "sum")
    if name == "a_of_q":
        return theta_a_expr("lattice")
    if name == "f1":
        (a,) = _need(params, "a")
        return f1_expr(variant, a, base)
    if name == "f2":
        (a,) = _need(params, "a")
        return f2_expr(a, base)
    if name == "f":
        a, k, z = _need(params, "a", "k", "z")
        return f_expr(a, k, z, base)
    raise UnknownSeries(name)


def expansion_rows(series: QSeries) -> list[tuple[int, Coefficient]]:
    lo = min(series.val, 0)
    return [(e, series[e]) for e in range(lo, series.order)] if lo < series.order else []


def cmd_expand(args) -> int:
    params = parse_params(args.param)
    order = DEFAULT_ORDER if args.order is None else args.order
    try:
        expr = build_series(args.series, params, args.base, args.variant)
        series = expr.exact(order).truncate(order)
    except OPERATIONAL_ERRORS as exc:
        print(f"{args.series}: {_describe_error(exc)}", file=sys.stderr)
        return 2
    rows = expansion_rows(series)
    if args.format == "json":
        payload = [{"exponent": e, "re": str(c.re), "im": str(c.im)} for e, c in rows]
        _emit([json.dumps(payload, indent=2)], args)
    else:
        _emit([f"{e} {c.re} {c.im}" for e, c in rows], args)
    return 0


def cmd_pairs_check(args) -> int:
    params = parse_params(args.param)
    order = DEFAULT_ORDER if args.order is None else args.order
    ids = PAIR_IDS if args.pair in (None, "all") else (args.pair,)
    rows = []
    status = 0
    for pid in ids:
        a = params.get("a", qm(2, 1))
        k = params.get("k", qm(9, 2) if pid == "sqrtk" else qm(3, 2))
        aux = {n: params[n] for n in ("rho1", "rho2") if n in params}
        try:
            report = wp_check(catalog_pair(pid), a, k, args.n_max, order, **aux)
            verdict = "PASS" if report.passed else "FAIL"
            detail = "" if report.passed else f"first failure at n={report.first_failure[0]}, q^{report.first_failure[1]}"
            if not report.passed:
                status = max(status, 1)
        except OPERATIONAL_ERRORS as exc:
            verdict, detail = "ERROR", _describe_error(exc)
            print(f"{pid}: {detail}", file=sys.stderr)
            status = 2
        rows.append({"id": pid, "check": "wp", "order": order, "n_max": args.n_max, "outcome": verdict.lower(), "detail": detail})
    if args.format == "json":
        _emit([json.dumps(rows, indent=2)], args)
    else:
        _emit([f"{r['id']} wp {r['order']} {r['outcome'].upper()} {r['detail']}".rstrip() for r in rows], args)
    return status


def _order(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"order must be an integer, got {text!r}") from None
    if n < MIN_ORDER:
        raise argparse.ArgumentTypeError(f"order must be at least {MIN_ORDER}")
    return n


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wpbailey", description="Verify WP-Bailey pair identities exactly or numerically.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--order", type=_order, default=None, help=f"truncation order N (>= {MIN_ORDER})")
        p.add_argument("--param", action="append", metavar="NAME=[p/q,r/s]q^e", help="exact Gaussian-rational monomial")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", default=None, help="write the report to this file")

    v = sub.add_parser("verify", help="verify registry identities")
    v.add_argument("--id", default="all", help="identity id or 'all'")
    v.add_argument("--backend", choices=("exact", "numeric"), default="exact")
    v.add_argument("--q", default="0.3", help="evaluation point for the numeric backend")
    v.add_argument("--pair", default=None, help="WP-Bailey pair (or derived pair) id")
    common(v)
    v.set_defaults(func=cmd_verify)

    ls = sub.add_parser("list", help="list identities and pairs")
    ls.add_argument("what", nargs="?", choices=("identities", "pairs", "all"), default="all")
    ls.add_argument("--format", choices=("text", "json"), default="text")
    ls.add_argument("--output", default=None)
    ls.set_defaults(func=cmd_list)

    ex = sub.add_parser("expand", help="print coefficients of a named series")
    ex.add_argument("--series", required=True, help="one of " + ", ".join(SERIES))
    ex.add_argument("--base", type=int, default=1, help="replace q by q^base")
    ex.add_argument("--variant", choices=F1_VARIANTS, default="lambert", help="representation used for f1")
    common(ex)
    ex.set_defaults(func=cmd_expand)

    pc = sub.add_parser("pairs-check", help="check the defining relation of catalog pairs")
    pc.add_argument("--pair", default=None, help="pair id or 'all'")
    pc.add_argument("--n-max", type=int, default=8)
    common(pc)
    pc.set_defaults(func=cmd_pairs_check)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "base", 1) < 1:
            raise UsageError("--base must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
