"""Command-line surface for the verification suites.

Subcommands:

    hg eval      sum a hypergeometric series at a point
    hg verify    run the transformation catalog at sampled admissible points
    mf eval      evaluate a named modular function at an exact CM point
    mf verify    run the Eisenstein/theta/hauptmodul identity catalog
    arith ap     point counts, hypergeometric traces, lattice coefficients
    arith traces trace-identity sweep over the table rows
    lv value     one L-value through both routes
    lv tables    reproduce a table/theorem suite
    report all   the full acceptance run

Exit status: 0 if every selected check passed, 1 if any failed, 2 on usage
errors.  All output is deterministic: values are printed as fixed-precision
decimal strings and rows keep table order.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import mpmath

from . import __version__
from .cmpoint import CMPoint
from .precision import PrecisionContext


@dataclass
class RunConfig:
    precision_bits: int = 256
    series_tolerance: float = 1e-36
    identity_tolerance: float = 1e-30
    prime_bound: int = 200
    suites: List[str] = field(default_factory=list)
    out_format: str = "text"
    output: Optional[str] = None

    def __post_init__(self):
        if self.prime_bound < 5:
            raise ValueError("prime_bound must be >= 5")

    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.precision_bits, self.series_tolerance,
                                64, self.identity_tolerance)


def _digits(ctx: PrecisionContext) -> int:
    return max(20, int(ctx.working_precision_bits * 0.3010) - 2)


def _fmt(x, ctx) -> str:
    return mpmath.nstr(x, _digits(ctx), strip_zeros=False)


_TAU_RE = re.compile(
    r"^\(?\s*(?:(?P<a>-?\d+(?:/\d+)?)\s*\+)?\s*"
    r"(?P<b>-?\d+(?:/\d+)?)?\s*\*?\s*"
    r"(?:(?P<i>i)|sqrt\(\s*-\s*(?P<D>\d+)\s*\))\s*\)?"
    r"(?:\s*/\s*(?P<c>\d+))?$")


def parse_tau(text: str) -> CMPoint:
    """Parse exact CM points like 'i', '2i', 'i/2', 'sqrt(-7)',
    '(1+sqrt(-7))/2', '(1+3*sqrt(-3))/2', '3/2*sqrt(-2)'."""
    text = text.strip().replace(" ", "")
    m = _TAU_RE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse CM point {text!r}")
    a = Fraction(m.group("a") or 0)
    b = Fraction(m.group("b") or 1)
    D = 1 if m.group("i") else int(m.group("D"))
    c = Fraction(m.group("c") or 1)
    return CMPoint(a / c, b / c, D)


def _emit(payload: dict, cfg: RunConfig) -> None:
    if cfg.out_format == "json":
        text = json.dumps(payload, indent=1, sort_keys=True)
    elif cfg.out_format == "markdown":
        text = _to_markdown(payload)
    else:
        text = _to_text(payload)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _to_text(payload: dict) -> str:
    lines = []
    for key, value in payload.items():
        if key == "rows":
            for row in value:
                status = "pass" if row.get("passed", True) else "FAIL"
                extras = {k: v for k, v in row.items()
                          if k not in ("passed", "row_id")}
                lines.append(f"[{status}] {row.get('row_id', '')} "
                             + " ".join(f"{k}={v}" for k, v in extras.items()))
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def _to_markdown(payload: dict) -> str:
    lines = []
    rows = payload.get("rows", [])
    if rows:
        keys = sorted({k for row in rows for k in row})
        lines.append("| " + " | ".join(keys) + " |")
        lines.append("|" + "---|" * len(keys))
        for row in rows:
            lines.append("| " + " | ".join(str(row.get(k, "")) for k in keys) + " |")
    for key, value in payload.items():
        if key != "rows":
            lines.append(f"\n**{key}**: {value}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def cmd_hg_eval(args, cfg: RunConfig) -> int:
    from .hypergeom import HypergeometricDatum, pfq
    ctx = cfg.ctx()
    upper = [Fraction(x) for x in args.upper.split(",")]
    lower = [Fraction(x) for x in args.lower.split(",")]
    if len(lower) == len(upper) - 1:
        lower = [Fraction(1)] + lower
    datum = HypergeometricDatum(upper, lower, Fraction(args.argument))
    with ctx.workprec():
        value = pfq(datum, ctx)
    _emit({"value": _fmt(value, ctx)}, cfg)
    return 0


def cmd_hg_verify(args, cfg: RunConfig) -> int:
    from .hypergeom import (TRANSFORM_IDS, transform_samples, verify_transform,
                            verify_prop21_chain)
    ctx = cfg.ctx()
    ids = TRANSFORM_IDS if args.id == "all" else (args.id,)
    rows, ok = [], True
    for ident in ids:
        samples = transform_samples(ident, args.samples)
        with ctx.workprec():
            worst = max(verify_transform(ident, z, ctx, slots=p) for p, z in samples)
        passed = bool(worst < ctx.identity_tolerance)
        ok &= passed
        rows.append({"row_id": ident, "max_residual": mpmath.nstr(worst, 8),
                     "samples": len(samples), "passed": passed})
    if args.id == "all":
        with ctx.workprec():
            worst = max(verify_prop21_chain(z, ctx) for z in
                        (Fraction(1, 100), Fraction(-1, 100), Fraction(1, 20),
                         Fraction(-1, 20), Fraction(1, 10)))
        passed = bool(worst < ctx.identity_tolerance)
        ok &= passed
        rows.append({"row_id": "prop21_chain_points", "max_residual":
                     mpmath.nstr(worst, 8), "samples": 5, "passed": passed})
    _emit({"rows": rows, "passed": ok}, cfg)
    return 0 if ok else 1


def cmd_mf_eval(args, cfg: RunConfig) -> int:
    from . import modforms as mf
    ctx = cfg.ctx()
    tau = args.tau
    fn = args.fn
    with ctx.workprec():
        if fn == "eta":
            value = mf.eta_value(tau, ctx)
        elif fn in ("theta2", "theta3", "theta4"):
            value = mf.theta_value(int(fn[-1]), tau, ctx)
        elif fn == "g2star":
            value = mf.g2_star(tau, ctx)
        elif fn in ("e2", "e4", "e6"):
            value = mf.e_k(int(fn[1]), tau, ctx)
        elif fn in ("g4", "g6"):
            value = mf.g_k(int(fn[1]), tau, ctx)
        elif fn == "j":
            value = mf.j_invariant(tau, ctx)
        elif fn in ("t2", "t3", "t4", "t6"):
            value = mf.hauptmodul(int(fn[1]), tau, ctx)
        elif fn == "t5":
            value = mf.t5_value(tau, ctx)
        elif fn == "t25":
            value = mf.t25_value(tau, ctx)
        elif fn == "u6":
            value = mf.u6_value(tau, ctx)
        elif fn.startswith("g2n"):
            value = mf.g2n(int(fn[3:]), tau, ctx)
        else:
            print(f"unknown function {fn!r}", file=sys.stderr)
            return 2
    _emit({"function": fn, "value": _fmt(value, ctx)}, cfg)
    return 0


def cmd_mf_verify(args, cfg: RunConfig) -> int:
    from .identities import IDENTITY_IDS, verify_eisenstein_identity
    ctx = cfg.ctx()
    ids = IDENTITY_IDS if args.id == "all" else (args.id,)
    rows, ok = [], True
    for ident in ids:
        with ctx.workprec():
            worst = verify_eisenstein_identity(ident, ctx=ctx, samples=args.samples)
        passed = bool(worst < ctx.identity_tolerance)
        ok &= passed
        rows.append({"row_id": ident, "max_residual": mpmath.nstr(worst, 8),
                     "passed": passed})
    _emit({"rows": rows, "passed": ok}, cfg)
    return 0 if ok else 1


def cmd_arith_ap(args, cfg: RunConfig) -> int:
    if args.form:
        from .cmforms import lattice_an
        value = lattice_an(args.form, args.n)
        _emit({"form": args.form, "n": args.n, "a_n": value}, cfg)
        return 0
    from .finitefield import CurveModel, FiniteFieldDatum, count_points, hp
    if args.kind == "curve":
        value = count_points(CurveModel(args.d, Fraction(args.z)), args.prime)
        _emit({"d": args.d, "z": args.z, "p": args.prime, "a_p": value}, cfg)
    else:
        datum = FiniteFieldDatum(args.kind, args.d, Fraction(args.z))
        _emit({"datum": args.kind, "d": args.d, "parameter": args.z,
               "p": args.prime, "H_p": hp(datum, args.prime)}, cfg)
    return 0


def cmd_arith_traces(args, cfg: RunConfig) -> int:
    from .cmforms import good_prime, get_form, verify_trace_identity
    from .finitefield import primes_below
    from .lvalues import tables
    rows, ok = [], True
    seen = set()
    table_rows = tables()["table1a"] + tables()["table3"]
    for row in table_rows:
        key = (row["d"], row["t"])
        if key in seen:
            continue
        seen.add(key)
        d, t = row["d"], Fraction(row["t"])
        form = get_form(row["form"])
        fails, n_checked = [], 0
        for p in primes_below(cfg.prime_bound):
            if not good_prime(d, t, form.level, p):
                continue
            chk = verify_trace_identity(d, t, p, form)
            n_checked += 1
            if not chk.passed:
                fails.append(p)
        passed = not fails
        ok &= passed
        rows.append({"row_id": f"d={d},t={t}", "form": row["form"],
                     "primes_checked": n_checked,
                     "failing_primes": fails, "passed": passed})
    _emit({"rows": rows, "passed": ok, "prime_bound": cfg.prime_bound}, cfg)
    return 0 if ok else 1


def cmd_lv_value(args, cfg: RunConfig) -> int:
    from .lvalues import lvalue_afe, lvalue_eisenstein
    ctx = cfg.ctx()
    with ctx.workprec():
        eis = lvalue_eisenstein(args.form, args.s, ctx)
        payload = {"form": args.form, "eisenstein": _fmt(eis, ctx)}
        if not args.no_afe:
            afe, eps = lvalue_afe(args.form, args.s, ctx, return_eps=True)
            payload["afe"] = _fmt(afe, ctx)
            payload["root_number"] = eps
            payload["deviation"] = mpmath.nstr(abs(afe - eis), 8)
    _emit(payload, cfg)
    return 0


def _suite_rows(suite: str, ctx) -> List[dict]:
    from .lvalues import reproduce
    out = []
    for rep in reproduce(suite, ctx):
        row = {"row_id": rep.row_id, "form": rep.form_label, "s": rep.s,
               "max_deviation": "%.6g" % rep.max_deviation,
               "passed": rep.passed}
        row.update(rep.values)
        if rep.notes:
            row["notes"] = rep.notes
        out.append(row)
    return out


def cmd_lv_tables(args, cfg: RunConfig) -> int:
    from .lvalues import SUITE_IDS
    ctx = cfg.ctx()
    suites = SUITE_IDS if args.suite == "all" else tuple(args.suite.split(","))
    unknown = [s for s in suites if s not in SUITE_IDS]
    if unknown:
        print(f"unknown suite ids {unknown}; known: {SUITE_IDS}", file=sys.stderr)
        return 2
    rows, ok = [], True
    for suite in suites:
        srows = _suite_rows(suite, ctx)
        for r in srows:
            r["suite"] = suite
            ok &= r["passed"]
        rows.extend(srows)
    _emit({"rows": rows, "passed": ok}, cfg)
    return 0 if ok else 1


def cmd_report_all(args, cfg: RunConfig) -> int:
    """Full acceptance run: every suite, identity catalog, transformation
    catalog, and the finite-field sweep."""
    from .lvalues import SUITE_IDS
    ctx = cfg.ctx()
    t0 = time.time()
    sections = {}
    ok = True

    rows = []
    for suite in SUITE_IDS:
        for r in _suite_rows(suite, ctx):
            r["suite"] = suite
            ok &= r["passed"]
            rows.append(r)
    sections["lvalue_rows"] = rows

    from .hypergeom import TRANSFORM_IDS, transform_samples, verify_transform
    hg_rows = []
    for ident in TRANSFORM_IDS:
        samples = transform_samples(ident, args.samples)
        with ctx.workprec():
            worst = max(verify_transform(ident, z, ctx, slots=p)
                        for p, z in samples)
        passed = bool(worst < ctx.identity_tolerance)
        ok &= passed
        hg_rows.append({"row_id": ident, "max_residual": mpmath.nstr(worst, 8),
                        "passed": passed})
    sections["transformations"] = hg_rows

    from .identities import IDENTITY_IDS, verify_eisenstein_identity
    mf_rows = []
    for ident in IDENTITY_IDS:
        with ctx.workprec():
            worst = verify_eisenstein_identity(ident, ctx=ctx, samples=5)
        passed = bool(worst < ctx.identity_tolerance)
        ok &= passed
        mf_rows.append({"row_id": ident, "max_residual": mpmath.nstr(worst, 8),
                        "passed": passed})
    sections["eisenstein_identities"] = mf_rows

    class _TraceArgs:
        pass

    trace_cfg = RunConfig(cfg.precision_bits, cfg.series_tolerance,
                          cfg.identity_tolerance, cfg.prime_bound,
                          out_format="json", output="/dev/null")
    from .cmforms import good_prime, get_form, verify_trace_identity
    from .finitefield import primes_below
    from .lvalues import tables
    tr_rows = []
    seen = set()
    for row in tables()["table1a"] + tables()["table3"]:
        key = (row["d"], row["t"])
        if key in seen:
            continue
        seen.add(key)
        d, t = row["d"], Fraction(row["t"])
        form = get_form(row["form"])
        fails = [p for p in primes_below(cfg.prime_bound)
                 if good_prime(d, t, form.level, p)
                 and not verify_trace_identity(d, t, p, form).passed]
        passed = not fails
        ok &= passed
        tr_rows.append({"row_id": f"d={d},t={t}", "form": row["form"],
                        "failing_primes": fails, "passed": passed})
    sections["trace_identities"] = tr_rows

    flat = []
    for name, sec in sections.items():
        for r in sec:
            r2 = dict(r)
            r2["section"] = name
            flat.append(r2)
    payload = {"rows": flat, "passed": ok,
               "elapsed_seconds": round(time.time() - t0, 1),
               "version": __version__}
    _emit(payload, cfg)
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmlv", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--precision-bits", type=int, default=256)
    ap.add_argument("--series-tolerance", type=float, default=1e-36)
    ap.add_argument("--identity-tolerance", type=float, default=1e-30)
    ap.add_argument("--prime-bound", type=int, default=200)
    ap.add_argument("--format", choices=("json", "markdown", "text"),
                    default="text")
    ap.add_argument("--output", default=None, help="write the report to a file")
    sub = ap.add_subparsers(dest="command", required=True)

    hg = sub.add_parser("hg", help="hypergeometric series").add_subparsers(
        dest="action", required=True)
    he = hg.add_parser("eval")
    he.add_argument("--upper", required=True, help="comma-separated rationals")
    he.add_argument("--lower", required=True,
                    help="comma-separated rationals (leading 1 optional)")
    he.add_argument("--argument", required=True)
    he.set_defaults(func=cmd_hg_eval)
    hv = hg.add_parser("verify")
    hv.add_argument("--id", default="all")
    hv.add_argument("--samples", type=int, default=20)
    hv.set_defaults(func=cmd_hg_verify)

    mf = sub.add_parser("mf", help="modular functions").add_subparsers(
        dest="action", required=True)
    me = mf.add_parser("eval")
    me.add_argument("--fn", required=True)
    me.add_argument("--tau", required=True, type=parse_tau,
                    help="exact CM point, e.g. 'i', '(1+sqrt(-7))/2'")
    me.set_defaults(func=cmd_mf_eval)
    mv = mf.add_parser("verify")
    mv.add_argument("--id", default="all")
    mv.add_argument("--samples", type=int, default=5)
    mv.set_defaults(func=cmd_mf_verify)

    ar = sub.add_parser("arith", help="finite-field side").add_subparsers(
        dest="action", required=True)
    aa = ar.add_parser("ap")
    aa.add_argument("--kind", choices=("curve", "HD2", "HD3"), default="curve")
    aa.add_argument("--d", type=int, default=2)
    aa.add_argument("--z", default="2", help="curve/datum parameter")
    aa.add_argument("--prime", type=int, default=5)
    aa.add_argument("--form", default=None, help="lattice coefficient mode")
    aa.add_argument("--n", type=int, default=1)
    aa.set_defaults(func=cmd_arith_ap)
    at = ar.add_parser("traces")
    at.set_defaults(func=cmd_arith_traces)

    lvp = sub.add_parser("lv", help="L-values").add_subparsers(
        dest="action", required=True)
    lval = lvp.add_parser("value")
    lval.add_argument("--form", required=True)
    lval.add_argument("--s", type=int, default=None)
    lval.add_argument("--no-afe", action="store_true")
    lval.set_defaults(func=cmd_lv_value)
    lt = lvp.add_parser("tables")
    lt.add_argument("--suite", default="all")
    lt.set_defaults(func=cmd_lv_tables)

    rp = sub.add_parser("report", help="acceptance runs").add_subparsers(
        dest="action", required=True)
    ra = rp.add_parser("all")
    ra.add_argument("--samples", type=int, default=20)
    ra.set_defaults(func=cmd_report_all)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = RunConfig(args.precision_bits, args.series_tolerance,
                        args.identity_tolerance, args.prime_bound,
                        out_format=args.format, output=args.output)
    except ValueError as exc:
        ap.error(str(exc))
    try:
        return args.func(args, cfg)
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())
