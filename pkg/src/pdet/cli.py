"""Command-line entry point.

Exit codes: 0 success, 1 a verification mismatch, 2 bad invocation or
input, 3 a computation that could not be completed (no convergence,
solver or accuracy failure).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import _kernels
from .diffop import (BUNDLED, RatFunc, bundled_operator, detp_rational, detp_series,
                     load_operator)
from .errors import InvalidInputError, NotPolynomialError, OperatorFileError, PdetError
from .monodromy import lambda_elliptic, lambda_heun, monodromy_numeric
from .regdet import ldet, regularized_wpoly, wpoly_coeffs
from .rings import format_rational, is_prime
from .series import LaurentSeries
from .verify import (CACHE_ENV, CoefficientCache, denominator_profile, h_series,
                     normalized_ldet, reports_table, verify_congruence)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _resolve_op(spec: str):
    """A path, or the name of a bundled operator file."""
    if os.path.exists(spec):
        return load_operator(spec)
    stem = os.path.basename(spec)
    stem = stem[:-5] if stem.endswith(".json") else stem
    if stem in BUNDLED:
        return bundled_operator(stem)
    raise OperatorFileError(f"operator file not found: {spec}")


def parse_prefactor(text: str) -> RatFunc:
    """Rational function of ``t`` from an expression such as ``-(1+t)``."""
    import sympy
    t = sympy.Symbol("t")
    try:
        expr = sympy.sympify(text, locals={"t": t})
        num, den = sympy.fraction(sympy.together(expr))
        pn = sympy.Poly(num, t, domain="QQ")
        pd = sympy.Poly(den, t, domain="QQ")
    except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError) as exc:
        raise InvalidInputError(f"cannot parse prefactor {text!r}: {exc}") from None
    as_list = lambda p: [str(c) for c in reversed(p.all_coeffs())]
    return RatFunc(as_list(pn), as_list(pd))


def _primes(text: str) -> list:
    try:
        ps = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise InvalidInputError(f"bad prime list {text!r}") from None
    if len(set(ps)) != len(ps):
        raise InvalidInputError("primes must be distinct")
    return ps


def _mono(c: int, k: int) -> str:
    if k == 0:
        return str(c)
    return ("" if c == 1 else f"{c}*") + f"t^{k}"


def _join_values(argv: list) -> list:
    """Glue ``--prefactor -(1+t)`` into one token so argparse keeps the leading minus."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--prefactor", "--t") and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _order(value: str) -> int:
    K = int(value)
    if K < 1:
        raise argparse.ArgumentTypeError("order must be at least 1")
    return K


def _fmt_series(s) -> str:
    if isinstance(s, LaurentSeries):
        s = s.to_trunc()
    return str(s)


def _series_json(s) -> list:
    if isinstance(s, LaurentSeries):
        s = s.to_trunc()
    return [format_rational(c) for c in s.coeffs]


def _cache(args):
    if getattr(args, "cache_dir", None):
        return CoefficientCache(args.cache_dir)
    if os.environ.get(CACHE_ENV):
        return CoefficientCache()
    return None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_detp(args, out):
    D = _resolve_op(args.op)
    if args.prefactor is not None:
        D = D.with_prefactor(parse_prefactor(args.prefactor))
    rows = []
    for p in _primes(args.prime):
        if not is_prime(p):
            raise InvalidInputError(f"{p} is not prime")
        num, den = detp_rational(D, p)
        if den.degree > 0:
            if args.order is None:
                raise NotPolynomialError(
                    f"Det_p is not a polynomial for p = {p}; pass --order for its expansion")
            res = detp_series(D, p, args.order)
            terms = [_mono(c, k) for k, c in enumerate(res) if c]
            text = (" + ".join(terms) or "0") + f" + O(t^{args.order}) (mod {p})"
            rows.append({"prime": p, "polynomial": False, "series": res, "text": text})
        else:
            rows.append({"prime": p, "polynomial": True, "coefficients": num.residues(),
                         "text": str(num)})
    if args.format == "json":
        out.write(json.dumps({"detp": rows}, sort_keys=True) + "\n")
    else:
        for r in rows:
            out.write(r["text"] + "\n")
    return EXIT_OK


def cmd_ldet(args, out):
    D = _resolve_op(args.op)
    t0 = time.perf_counter()
    value, report = ldet(D, args.order, args.eps_bound, with_report=True)
    if args.format == "json":
        out.write(json.dumps({"ldet": _series_json(value), "certified_order": report.certified_order,
                              "stabilization": report.to_json(),
                              "timing": {"elapsed_s": round(time.perf_counter() - t0, 3)}},
                             sort_keys=True) + "\n")
    else:
        out.write(f"L(D) = {value}\n")
        out.write(f"certified order: t^{report.certified_order - 1} "
                  f"(windows {report.windows[0]} .. {report.windows[-1]})\n")
    return EXIT_OK


def cmd_wpoly(args, out):
    D = _resolve_op(args.op)
    w, report = regularized_wpoly(D, args.order, args.eps_bound)
    ws = wpoly_coeffs(w, D.n)
    if args.format == "json":
        out.write(json.dumps({"w": [_series_json(s) for s in ws],
                              "certified_order": report.certified_order}, sort_keys=True) + "\n")
    else:
        for i, s in enumerate(ws, start=1):
            out.write(f"w_{i} = {s}\n")
    return EXIT_OK


def cmd_lambda(args, out):
    if args.variant == "heun":
        lam = lambda_heun(args.order)
    else:
        lam = lambda_elliptic(args.order)
    if args.format == "json":
        out.write(json.dumps({"variant": args.variant, "order": args.order,
                              "coefficients": _series_json(lam)}, sort_keys=True) + "\n")
    else:
        out.write(_fmt_series(lam) + "\n")
    return EXIT_OK


def cmd_verify(args, out):
    D = _resolve_op(args.op)
    reports = verify_congruence(D, _primes(args.primes), args.order,
                                include_two=args.include_two, cache=_cache(args))
    bad = [r for r in reports if r.skipped is None and not r.passed and not r.informational]
    if args.format == "json":
        out.write(json.dumps({"reports": [r.to_json() for r in reports], "passed": not bad},
                             sort_keys=True) + "\n")
    else:
        out.write(reports_table(reports) + "\n")
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_denoms(args, out):
    if args.op:
        series = -normalized_ldet(_resolve_op(args.op), args.order, _cache(args))
    else:
        series = h_series(args.order, _cache(args))
    prof = denominator_profile(series, args.start)
    if args.format == "json":
        out.write(json.dumps(prof.to_json(), sort_keys=True) + "\n")
    else:
        for e in prof.entries:
            fac = " * ".join(f"{p}^{a}" for p, a in e.alpha.items() if a)
            note = "ok" if e.agrees else f"differs at {e.mismatched_primes}"
            if e.documented_exception:
                note = "documented exception"
            if not e.sign_ok:
                note += ", sign"
            if e.extra_primes:
                note += f", extra primes {sorted(e.extra_primes)}"
            out.write(f"n={e.n:>3} sign={'+' if e.sign > 0 else '-'} den={fac or '1'}  {note}\n")
    return EXIT_OK


def cmd_monodromy(args, out):
    D = _resolve_op(args.op)
    try:
        t_value = complex(args.t.replace("i", "j"))
    except ValueError:
        raise InvalidInputError(f"bad t value {args.t!r}") from None
    res = monodromy_numeric(D, t_value, args.radius, args.tol)
    if args.format == "json":
        payload = res.to_json()
        payload["backend"] = _kernels.backend()
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        for z in res.eigenvalues:
            out.write(f"{z.real:.15f} {z.imag:+.15f}i  |z|={abs(z):.15f}\n")
        out.write(f"steps={res.steps} error_estimate={res.error_estimate:.3e}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pdet", description="p-determinants and their universal series.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, op=True, order=None):
        if op:
            sp.add_argument("--op", required=True,
                            help=f"operator JSON file or bundled name ({', '.join(BUNDLED)})")
        if order is not False:
            sp.add_argument("--order", type=_order, default=order, help="t-order K")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("detp", help="Det_p(D) over F_p")
    common(sp, order=None)
    sp.add_argument("--prime", required=True, help="prime or comma-separated primes")
    sp.add_argument("--prefactor", help="rational function of t multiplying D, e.g. '-(1+t)'")
    sp.set_defaults(func=cmd_detp)

    for name, func, helptext in (("ldet", cmd_ldet, "the series L(D)"),
                                 ("wpoly", cmd_wpoly, "w_1 .. w_n of the Weierstrass polynomial")):
        sp = sub.add_parser(name, help=helptext)
        common(sp, order=6)
        sp.add_argument("--eps-bound", type=int, default=None)
        sp.set_defaults(func=func)

    sp = sub.add_parser("lambda", help="monodromy exponent series")
    common(sp, op=False, order=8)
    sp.add_argument("--variant", choices=("heun", "elliptic"), required=True)
    sp.set_defaults(func=cmd_lambda)

    sp = sub.add_parser("verify", help="congruence check detp vs ldet")
    common(sp, order=7)
    sp.add_argument("--primes", default="5,7,11,13")
    sp.add_argument("--include-two", action="store_true")
    sp.add_argument("--cache-dir", default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("denoms", help="denominator profile of h (or of -c(0) L(D))")
    sp.add_argument("--op", default=None)
    sp.add_argument("--order", type=_order, default=13)
    sp.add_argument("--start", type=int, default=2)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--cache-dir", default=None)
    sp.set_defaults(func=cmd_denoms)

    sp = sub.add_parser("monodromy-num", help="numeric holonomy eigenvalues")
    common(sp, order=False)
    sp.add_argument("--t", default="0")
    sp.add_argument("--radius", type=float, default=0.5)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_monodromy)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(list(sys.argv[1:] if argv is None else argv)))
        return args.func(args, out)
    except _UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (InvalidInputError, NotPolynomialError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except PdetError as exc:
        err.write(f"failure: {type(exc).__name__}: {exc}\n")
        return EXIT_FAILURE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
