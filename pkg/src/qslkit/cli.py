"""``qslkit`` command-line front-end.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 check failure,
5 no saturating state for the requested parameters.
"""

import argparse
import math
import sys
import time

from . import __version__
from .bounds import (BoundKind, cz_bound_at_theta, cz_bound_fixed_p, cz_bound_2d, dual_ml_bound,
                     lc_bound, lz_bound, ml_bound, mt_bound)
from .errors import (ConvergenceError, DomainError, QuadratureError, SaturabilityError,
                     ValidationError)
from .fixtures import CASE_IDS, case_state
from .io import dump_state, dumps, load_state, to_csv
from .optimizer import optimize_p
from .saturation import evolution_time, saturating_state
from .spectrum import DiscreteSpectrum
from .table import check_table, compute_table

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_CHECK, EXIT_SATURABILITY = 0, 2, 3, 4, 5
DOMINANCE_TOL = 1e-9

RECORD_FIELDS = ("kind", "value", "divergent", "p_opt", "theta_opt", "e_r_opt", "wall_time_ms")
BOUND_CHOICES = ("mt", "ml", "dualml", "lz", "lc", "chau", "cz", "all")
_TUNABLE = {"lz": BoundKind.LZ, "lc": BoundKind.LC, "cz": BoundKind.CZ}


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _unit_interval(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _positive(text):
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="qslkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qslkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_state(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--state", metavar="PATH", help="state JSON file")
        g.add_argument("--builtin", metavar="ID", help=f"built-in case: {', '.join(CASE_IDS)}")

    def add_common(p):
        p.add_argument("--format", choices=("json", "csv", "pretty"), default="pretty")
        p.add_argument("--p-min", type=_positive, default=None,
                       help="smallest exponent searched (overrides QSLKIT_P_MIN)")
        p.add_argument("--no-timing", action="store_true",
                       help="omit wall times so output is byte-reproducible")

    c = sub.add_parser("compute", help="evaluate bounds for one state")
    add_state(c)
    c.add_argument("--sqrt-fidelity", type=_unit_interval, required=True)
    c.add_argument("--bound", choices=BOUND_CHOICES, default="all")
    c.add_argument("--p", type=float, default=None, help="fixed exponent")
    c.add_argument("--optimize-p", action="store_true", help="optimize over the exponent")
    c.add_argument("--theta", type=float, default=None,
                   help="also report the CZ expression at this phase (fixed --p only)")
    add_common(c)

    t = sub.add_parser("table", help="recompute Table I")
    t.add_argument("--builtin", default="table1", choices=("table1",))
    t.add_argument("--check", action="store_true", help="compare with the printed values")
    add_common(t)

    s = sub.add_parser("saturate", help="write a three-level state that attains the CZ bound")
    s.add_argument("--p", type=_positive, required=True)
    s.add_argument("--sqrt-fidelity", type=_unit_interval, required=True)
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--e-r", type=float, default=0.0)
    s.add_argument("--scale", type=_positive, default=1.0)
    s.add_argument("--output", metavar="PATH", default=None, help="write here instead of stdout")

    v = sub.add_parser("verify", help="compare all bounds with the brute-force evolution time")
    add_state(v)
    v.add_argument("--sqrt-fidelity", type=_unit_interval, required=True)
    v.add_argument("--horizon", type=_positive, default=None,
                   help="oracle search cutoff (default: 100 times the largest finite bound)")
    add_common(v)
    return parser


# ---------------------------------------------------------------------------

def _load(args) -> DiscreteSpectrum:
    state = case_state(args.builtin) if args.builtin else load_state(args.state)
    if not isinstance(state, DiscreteSpectrum):
        raise CliError("bounds are defined for discrete spectra; got a density")
    return state


def _opt(x):
    return None if x is None else float(x)


def _record(res, elapsed_ms, timing=True):
    return {
        "kind": str(res.kind),
        "value": float(res.value),
        "divergent": bool(res.divergent),
        "p_opt": _opt(res.p_used),
        "theta_opt": _opt(res.theta_used),
        "e_r_opt": _opt(res.e_r_used),
        "wall_time_ms": round(elapsed_ms, 3) if timing else None,
    }


def _timed(fn):
    t0 = time.perf_counter()
    res = fn()
    return res, 1e3 * (time.perf_counter() - t0)


def _requested(args, state, eps):
    kinds = ("mt", "ml", "dualml", "lz", "lc", "cz") if args.bound == "all" else (args.bound,)
    if args.p is not None and args.optimize_p:
        raise CliError("--p and --optimize-p are mutually exclusive")
    if args.bound in _TUNABLE and args.p is None and not args.optimize_p:
        raise CliError(f"--bound {args.bound} needs --p or --optimize-p")
    if args.p is not None and not 0.0 < args.p <= 2.0:
        raise CliError("--p must lie in (0, 2]")
    fixed = {"lz": lz_bound, "lc": lc_bound, "cz": cz_bound_fixed_p}
    jobs = []
    for k in kinds:
        if k == "mt":
            jobs.append(lambda: mt_bound(state, eps))
        elif k == "ml":
            jobs.append(lambda: ml_bound(state, eps))
        elif k == "dualml":
            jobs.append(lambda: dual_ml_bound(state, eps))
        elif k == "chau":
            jobs.append(lambda: lc_bound(state, eps, 1.0))
        elif args.p is not None:
            jobs.append(lambda f=fixed[k]: f(state, eps, args.p))
        else:
            jobs.append(lambda kind=_TUNABLE[k]: optimize_p(kind, state, eps, args.p_min))
    return jobs


def run_compute(args, out):
    state = _load(args)
    eps = args.sqrt_fidelity ** 2
    records = []
    for job in _requested(args, state, eps):
        res, ms = _timed(job)
        rec = _record(res, ms, not args.no_timing)
        if args.theta is not None and res.kind is BoundKind.CZ and args.p is not None:
            rec["theta"] = args.theta
            rec["value_at_theta"] = cz_bound_at_theta(state, eps, args.p, args.theta).value
        records.append(rec)
    cols = list(RECORD_FIELDS)
    if any("theta" in r for r in records):
        cols += ["theta", "value_at_theta"]
    _emit(out, args.format, records, cols)
    return EXIT_OK


def run_table(args, out):
    cells = compute_table(p_min=args.p_min)
    records = []
    report = check_table(cells) if args.check else None
    checks = {(c.cell.case, c.cell.sqrt_fidelity, c.cell.column): c
              for c in (report.checks if report else ())}
    for cell in cells:
        rec = {"case": cell.case, "sqrt_fidelity": cell.sqrt_fidelity, "bound": cell.column}
        rec.update(_record(cell.result, cell.wall_time_ms, not args.no_timing))
        del rec["kind"]
        rec["path"] = cell.path
        chk = checks.get((cell.case, cell.sqrt_fidelity, cell.column))
        if chk is not None:
            rec["printed"] = chk.printed
            rec["printed_p"] = chk.printed_p
            rec["rel_dev"] = chk.rel_dev
            rec["status"] = ("pass" if chk.ok else
                             "known-conflict" if chk.known_conflict else "fail")
            rec["note"] = chk.known_conflict or chk.note
        records.append(rec)
    cols = list(records[0].keys())
    if args.format == "json":
        doc = {"cells": records}
        if report:
            doc["check"] = _check_summary(report)
        out.write(dumps(doc) + "\n")
    else:
        _emit(out, args.format, records, cols)
    if report is None:
        return EXIT_OK
    summary = _check_summary(report)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"table check {verdict}: {summary['cells_checked']} cells, "
          f"{summary['failures']} outside tolerance "
          f"({summary['known_conflicts']} known conflicts), "
          f"max relative deviation of reproduced cells {summary['max_rel_dev_reproduced']:.3g}",
          file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CHECK


def _check_summary(report):
    reproduced = [c.rel_dev for c in report.checks if c.ok and math.isfinite(c.rel_dev)]
    fails = report.failures
    return {
        "passed": report.passed,
        "cells_checked": len(report.checks),
        "failures": len(fails),
        "known_conflicts": sum(1 for c in fails if c.known_conflict),
        "max_rel_dev": report.max_rel_dev,
        "max_rel_dev_reproduced": max(reproduced, default=0.0),
    }


def run_saturate(args, out):
    if args.p > 2.0:
        raise CliError("--p must lie in (0, 2]")
    try:
        tri = saturating_state(args.p, args.sqrt_fidelity ** 2, args.theta, args.e_r, args.scale)
    except (DomainError, SaturabilityError) as exc:
        raise CliError(f"not saturable: {exc}", EXIT_SATURABILITY) from None
    text = dump_state(tri.state(name=f"saturating p={args.p!r}"),
                      predicted_tau=tri.predicted_tau,
                      params={"p": args.p, "theta": args.theta,
                              "sqrt_fidelity": args.sqrt_fidelity})
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def run_verify(args, out):
    state = _load(args)
    eps = args.sqrt_fidelity ** 2
    jobs = [lambda: mt_bound(state, eps), lambda: ml_bound(state, eps),
            lambda: dual_ml_bound(state, eps)]
    jobs += [lambda k=k: optimize_p(k, state, eps, args.p_min)
             for k in (BoundKind.LZ, BoundKind.LC, BoundKind.CZ)]
    if state.n == 2:
        jobs.append(lambda: cz_bound_2d(state, eps, args.p_min))
    timed = [_timed(j) for j in jobs]
    horizon = args.horizon
    if horizon is None:
        finite = [r.value for r, _ in timed if r.finite]
        scale = math.pi / state.span if state.span > 0 else 1.0
        horizon = 100.0 * max(finite + [scale])
    orc, orc_ms = _timed(lambda: evolution_time(state, eps, horizon))
    tau = orc.tau_first
    records = []
    ok = True
    for res, ms in timed:
        rec = _record(res, ms, not args.no_timing)
        rec["tau_oracle"] = tau
        # unreached within the horizon means tau > horizon: nothing to contradict
        dominated = tau is None or res.value <= tau + DOMINANCE_TOL
        rec["dominated"] = dominated
        ok &= dominated
        records.append(rec)
    if args.format == "json":
        doc = {"oracle": {"tau_first": tau, "achieved_fidelity": orc.achieved_fidelity,
                          "horizon": horizon, "event": orc.event,
                          "wall_time_ms": None if args.no_timing else round(orc_ms, 3)},
               "bounds": records}
        out.write(dumps(doc) + "\n")
    else:
        if args.format == "pretty":
            reached = "not reached" if tau is None else f"{tau:.10g}"
            out.write(f"oracle first-passage time: {reached} (horizon {horizon:.6g})\n")
        _emit(out, args.format, records, list(records[0].keys()))
    return EXIT_OK if ok else EXIT_CHECK


# ---------------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.6g}"
    return str(v)


def _emit(out, fmt, records, cols):
    if fmt == "json":
        out.write(dumps(records) + "\n")
    elif fmt == "csv":
        out.write(to_csv(records, cols))
    else:
        rows = [[_fmt(r.get(c)) for c in cols] for r in records]
        widths = [max(len(c), *(len(row[i]) for row in rows)) for i, c in enumerate(cols)]
        out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
        for row in rows:
            out.write("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() + "\n")


_COMMANDS = {"compute": run_compute, "table": run_table, "saturate": run_saturate,
             "verify": run_verify}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except CliError as exc:
        print(f"qslkit: {exc}", file=sys.stderr)
        return exc.code
    except SaturabilityError as exc:
        print(f"qslkit: {exc}", file=sys.stderr)
        return EXIT_SATURABILITY
    except (ValidationError, DomainError) as exc:
        print(f"qslkit: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, QuadratureError) as exc:
        print(f"qslkit: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
