"""Command-line front end: ``padic-hl <verb> [options]``.

Verbs: hl, coeff, prob, dist, simulate, verify, oracle.  Output is JSON with a
top-level ``"schema": 1`` field, or CSV with ``--format csv``.  Exit status is
0 on success, 1 on a domain error, 2 on a usage error and 3 when ``verify``
rejects the exact law.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from .exactnum import Interval, RationalFunction, T, as_rf
from .heckecoeff import coset_count, hecke_g, lr_table
from .hlpoly import skew_poly
from .lawbook import (
    LawSpec,
    corner_invertible_prob,
    corner_prob,
    exact_distribution,
    haar_sn_prob,
    invertible_prob,
    product_prob,
)
from .padicring import RingCfg
from .sigcore import Signature, parse_signature

SCHEMA = 1
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3


INTERVAL_DIGITS = 15


def _fmt_interval(x: Interval, digits: int = INTERVAL_DIGITS) -> str:
    """Outward rounding to a common denominator 10^digits, so the printed interval still contains x."""
    den = 10**digits
    lo = math.floor(Fraction(x.lo) * den)
    hi = math.ceil(Fraction(x.hi) * den)
    return f"[{lo}/{den}, {hi}/{den}]"


def _fmt(x, var: str = "t") -> str:
    if isinstance(x, RationalFunction):
        return x.format(var)
    if isinstance(x, Interval):
        return _fmt_interval(x)
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return str(x)


def _sig(text):
    try:
        return parse_signature(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad signature {text!r}: {exc}") from None


def _frac(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad fraction {text!r}") from None


def _param_choice(text: str):
    table = {"t": T, "t^2": T**2, "-t": -T}
    if text not in table:
        raise argparse.ArgumentTypeError("param must be one of t, t^2, -t")
    return text


# ---------------------------------------------------------------------------
# argument grammar


def _add_t(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t", type=_frac, help="numeric parameter as an exact fraction, e.g. 1/3")
    g.add_argument("--symbolic", action="store_true", help="keep t as a symbol")


def _add_law(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=["product", "corner", "haar", "corner_invertible", "invertible"])
    p.add_argument("--case", required=True)
    p.add_argument("--mu", type=_sig)
    p.add_argument("--nu", type=_sig)
    p.add_argument("--given", type=_sig)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)


def _add_ring(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--precision", type=int, default=8, help="K: arithmetic is mod p^K")
    p.add_argument("--nonresidue", type=int, help="d with s^2 = d (default: smallest non-residue)")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, help="worker threads (default PADIC_HL_THREADS or 1)")
    p.add_argument("--cutoff", type=int, help="largest first part kept as its own cell (default K - 4)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    parser = argparse.ArgumentParser(
        prog="padic-hl", description="Hall-Littlewood laws of p-adic random matrices", parents=[common]
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=text, parents=[common])

    p = verb("hl", "Hall-Littlewood polynomial P or Q (optionally skew)")
    p.add_argument("--kind", choices=["P", "Q"], default="P")
    p.add_argument("--lambda", dest="lam", type=_sig, required=True)
    p.add_argument("--mu", type=_sig, help="inner signature for a skew polynomial")
    p.add_argument("--k", type=int, help="number of variables")
    p.add_argument("--param", type=_param_choice, default="t", help="Hall-Littlewood parameter: t, t^2 or -t")
    _add_t(p)

    p = verb("coeff", "coefficient tables c^lambda and Hecke coefficients g(q)")
    p.add_argument("--case", choices=["std", "alt", "her"], required=True)
    p.add_argument("--mu", type=_sig, required=True)
    p.add_argument("--nu", type=_sig, required=True)
    p.add_argument("--lambda", dest="lam", type=_sig)
    p.add_argument("--hecke", action="store_true", help="report g(q) instead of c(t)")
    _add_t(p)

    p = verb("prob", "one exact probability")
    _add_law(p)
    p.add_argument("--lambda", dest="lam", type=_sig)
    p.add_argument("--target", type=_sig)
    p.add_argument("--q", type=int, help="residue field size (family invertible)")
    p.add_argument("--form", choices=["closed", "hl_exact", "hl_numeric"], default="closed")
    p.add_argument("--tolerance", type=_frac, default=Fraction(1, 10**12))
    _add_t(p)

    p = verb("dist", "exact law up to a cutoff, with the exact tail mass")
    _add_law(p)
    p.add_argument("--cutoff", type=int, default=4)
    _add_t(p)

    for name, text in (("simulate", "Monte Carlo histogram"), ("verify", "Monte Carlo versus the exact law")):
        p = verb(name, text)
        _add_law(p)
        _add_ring(p)
        p.add_argument("--backend", choices=["numba", "numpy"])
        if name == "verify":
            p.add_argument("--p-threshold", type=float, default=1e-3)
            p.add_argument("--discard-cap", type=float, default=1e-2)

    p = verb("oracle", "exhaustive enumeration at tiny sizes")
    p.add_argument("--kind", required=True, choices=["invertible_fraction", "coset_count", "residue_distribution", "product_transition"])
    p.add_argument("--case", choices=["alt", "her"])
    p.add_argument("--n", type=int, help="matrix size")
    p.add_argument("--p", type=int, default=2, help="residue field size (a prime)")
    p.add_argument("--mu", type=_sig)
    p.add_argument("--nu", type=_sig)
    p.add_argument("--ext", action="store_true", help="count lattices over the quadratic extension")
    return parser


# ---------------------------------------------------------------------------
# verbs


def _t_of(args, default=None):
    if getattr(args, "symbolic", False):
        return T
    if getattr(args, "t", None) is not None:
        return args.t
    if default is not None:
        return default
    return T


def _need(args, *names):
    missing = [f"--{n.replace('lam', 'lambda')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.verb} needs {' '.join(missing)}")


class UsageError(Exception):
    pass


def _spec(args, t) -> LawSpec:
    fam = args.family
    if fam == "product":
        _need(args, "mu", "nu")
    elif fam == "corner":
        _need(args, "given")
    elif fam == "haar":
        _need(args, "n")
    elif fam == "corner_invertible":
        _need(args, "n", "m")
    return LawSpec(fam, args.case, n=args.n, m=args.m, given=args.given, mu=args.mu, nu=args.nu, t=t)


def cmd_hl(args) -> dict:
    param = {"t": T, "t^2": T**2, "-t": -T}[args.param]
    lam = args.lam
    inner = args.mu if args.mu is not None else (() if args.kind == "P" else (0,) * len(lam))
    k = args.k if args.k is not None else len(lam) - len(inner) if args.kind == "P" else len(lam)
    poly = skew_poly(args.kind, lam, inner, k, param)
    t = None if (args.symbolic or args.t is None) else args.t
    rows = []
    for e, c in sorted(poly.terms.items(), reverse=True):
        c = as_rf(c)
        rows.append({"exponents": list(e), "coefficient": _fmt(c.eval_at(t) if t is not None else c)})
    return {"kind": args.kind, "lambda": lam.to_json(), "inner": list(inner), "nvars": poly.nvars, "param": args.param, "terms": rows}


def cmd_coeff(args) -> dict:
    table = lr_table(args.case, args.mu, args.nu)
    rows = []
    lams = [args.lam] if args.lam is not None else sorted(table.entries, reverse=True)
    for lam in lams:
        if args.hecke:
            g = hecke_g(args.case, args.mu, args.nu, lam)
            rows.append({"lambda": Signature(lam).to_json(), "g": g.format()})
        else:
            c = table.get(lam)
            value = c if (args.symbolic or args.t is None) else c.eval_at(args.t)
            rows.append({"lambda": Signature(lam).to_json(), "c": _fmt(value)})
    out = {"case": args.case, "mu": args.mu.to_json(), "nu": args.nu.to_json(), "entries": rows}
    if args.hecke:
        mu = args.mu
        out["coset_count"] = _fmt(coset_count(args.case, mu), "q") if args.case != "std" else None
    return out


def cmd_prob(args) -> dict:
    t = _t_of(args)
    fam, case = args.family, args.case
    if fam == "product":
        _need(args, "mu", "nu", "lam")
        value = product_prob(case, args.mu, args.nu, args.lam, t)
    elif fam == "corner":
        _need(args, "given", "target")
        value = corner_prob(case, args.given, args.target, t)
    elif fam == "haar":
        _need(args, "n", "lam")
        value = haar_sn_prob(case, args.n, args.lam, t, form=args.form, tol=args.tolerance)
    elif fam == "corner_invertible":
        _need(args, "n", "m", "lam")
        value = corner_invertible_prob(case, args.n, args.m, args.lam, t)
    else:
        _need(args, "n", "q")
        value = invertible_prob(case, args.n, args.q)
    return {"family": fam, "case": case, "t": _fmt(t), "value": _fmt(value)}


def cmd_dist(args) -> dict:
    t = _t_of(args)
    ref = exact_distribution(_spec(args, t), args.cutoff)
    return {"family": args.family, "case": args.case, "t": _fmt(t), **ref.to_json()}


def _simulate(args):
    from .veristat import run_experiment

    cfg = RingCfg(args.p, args.precision, args.nonresidue)
    spec = _spec(args, Fraction(1, args.p))
    h = run_experiment(spec, args.samples, args.seed, args.threads, cfg=cfg, cutoff=args.cutoff, backend=args.backend)
    return spec, h


def cmd_simulate(args) -> dict:
    _, h = _simulate(args)
    return {"family": args.family, "case": args.case, **h.to_json()}


def cmd_verify(args) -> tuple[dict, int]:
    from .veristat import compare

    spec, h = _simulate(args)
    ref = exact_distribution(spec, h.cutoff)
    report = compare(h, ref, args.p_threshold, args.discard_cap)
    doc = {"family": args.family, "case": args.case, "samples": h.total, "seed": args.seed, **report.to_json()}
    return doc, 0 if report.passed else EXIT_VERIFY


def cmd_oracle(args) -> dict:
    from . import veristat as vs

    kind = args.kind
    if kind in ("invertible_fraction", "residue_distribution"):
        _need(args, "case", "n")
        res = vs.brute_force(kind, case=args.case, size=args.n, q=args.p)
    elif kind == "coset_count":
        _need(args, "mu")
        res = vs.brute_force(kind, mu=args.mu, n=args.n, p=args.p, ext=args.ext)
    else:
        _need(args, "case", "mu", "nu")
        res = vs.brute_force(kind, case=args.case, mu=args.mu, nu=args.nu, p=args.p)
    if isinstance(res, dict):
        value = [[k.to_json() if isinstance(k, Signature) else k, _fmt(v)] for k, v in res.items()]
    else:
        value = _fmt(res)
    return {"kind": kind, "value": value}


# ---------------------------------------------------------------------------
# emission


def _csv_rows(verb: str, doc: dict) -> list[list]:
    def sig(x):
        return ",".join(str(a) for a in x)

    if verb == "hl":
        return [["exponents", "coefficient"]] + [[sig(r["exponents"]), r["coefficient"]] for r in doc["terms"]]
    if verb == "coeff":
        key = "g" if doc["entries"] and "g" in doc["entries"][0] else "c"
        return [["lambda", key]] + [[sig(r["lambda"]), r[key]] for r in doc["entries"]]
    if verb == "dist":
        return [["lambda", "prob"]] + [[sig(lam), p] for lam, p in doc["atoms"]] + [["tail", doc["tail"]]]
    if verb == "simulate":
        rows = [["lambda", "count"]] + [[sig(lam), c] for lam, c in doc["counts"]]
        return rows + [["tail", doc["tail_bin"]], ["discarded", doc["discarded"]]]
    if verb == "oracle" and isinstance(doc["value"], list):
        return [["key", "value"]] + [[sig(k) if isinstance(k, list) else k, v] for k, v in doc["value"]]
    return [["key", "value"]] + [[k, v] for k, v in doc.items() if not isinstance(v, (list, dict))]


def _emit(verb: str, doc: dict, fmt: str, out) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(_csv_rows(verb, doc))
        out.write(buf.getvalue())
    else:
        out.write(json.dumps({"schema": SCHEMA, "verb": verb, **doc}, indent=2) + "\n")


COMMANDS = {
    "hl": cmd_hl,
    "coeff": cmd_coeff,
    "prob": cmd_prob,
    "dist": cmd_dist,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = COMMANDS[args.verb](args)
    except UsageError as exc:
        err.write(f"padic-hl {args.verb}: {exc}\n")
        return EXIT_USAGE
    except (ValueError, ArithmeticError, TypeError, KeyError) as exc:
        err.write(f"padic-hl {args.verb}: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    status = 0
    if isinstance(result, tuple):
        result, status = result
    _emit(args.verb, result, getattr(args, "format", "json"), out)
    return status


if __name__ == "__main__":
    sys.exit(main())
