"""Command-line entry point: ``trunc-range <verb> [options]``.

Exit status is 0 on success, 1 for bad input or usage, and 2 when a
numerical routine fails or a checked inequality or limit does not hold.
"""

import argparse
import contextlib
import csv
import logging
import math
import os
import sys
from functools import partial

import numpy as np

from . import asymptotics, bounds, empirical
from .moments import h_function, moment_about, variance
from .skewing import FAMILIES, parse_family
from .truncated import TruncatedDistribution, symmetric

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2

log = logging.getLogger("trunc_range")

_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return f"{x:.15g}"


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _family(text):
    try:
        return parse_family(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _distribution(args) -> TruncatedDistribution:
    if args.symmetric or (args.a is None and args.b is None):
        if args.ell is None:
            raise ValueError("give --a and --b, or --ell with --symmetric")
        return symmetric(args.family, args.ell)
    if args.a is None or args.b is None:
        raise ValueError("both --a and --b are required for a general support")
    return TruncatedDistribution(args.family, args.a, args.b)


# -- verbs -------------------------------------------------------------------

def cmd_moment(args):
    d = _distribution(args)
    c = d.midpoint if args.c is None else args.c
    val = moment_about(d, c, args.p)
    with _output(args.output) as out:
        out.write(_fmt(val) + "\n")
    return EXIT_OK


def cmd_variance(args):
    d = _distribution(args)
    with _output(args.output) as out:
        out.write(f"moment_route={_fmt(variance(d))}\n")
        if d.is_symmetric:
            ell = d.b
            out.write(f"ell2h_route={_fmt(ell * ell * h_function(d.g, ell))}\n")
    return EXIT_OK


def _hcurve_row(ell, g, mode):
    h = h_function(g, ell, mode)
    return ell, h, math.sqrt(h)


def cmd_hcurve(args):
    if not 0.0 < args.ell_min < args.ell_max:
        raise ValueError("need 0 < --ell-min < --ell-max")
    if args.points < 2:
        raise ValueError("--points must be at least 2")
    ells = np.logspace(math.log10(args.ell_min), math.log10(args.ell_max), args.points)
    rows = asymptotics._map(partial(_hcurve_row, g=args.family, mode=args.mode), ells, args.jobs)
    with _output(args.output) as out:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["ell", "h", "ratio"])
        for ell, h, r in rows:
            w.writerow([_fmt(ell), _fmt(h), _fmt(r)])
    return EXIT_OK


def cmd_bounds_check(args):
    insts = bounds.fuzz_instances(args.instances, args.seed)
    results = bounds.run_suite(insts)
    ok = True
    with _output(args.output) as out:
        out.write(f"{'check':<24}{'passed':>10}{'total':>8}{'min_slack':>16}  status\n")
        for name, reps in results.items():
            passed = sum(r.satisfied for r in reps)
            worst = min(r.slack for r in reps)
            good = passed == len(reps)
            ok &= good
            out.write(f"{name:<24}{passed:>10}{len(reps):>8}{worst:>16.6g}  {'PASS' if good else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_NUMERIC


_SMALL_GRID = (1.0, 0.1, 0.01, 1e-3)


def cmd_limits(args):
    mode = args.mode
    if mode in ("small-moment", "small-h"):
        if args.ell_min is not None or args.ell_max is not None:
            hi = args.ell_max or 1.0
            lo = args.ell_min or 1e-3
            grid = np.logspace(math.log10(hi), math.log10(lo), args.points or 4)
        else:
            grid = _SMALL_GRID
        checks = asymptotics.limit_sweep_small(
            args.family, args.p, grid, mode="h" if mode == "small-h" else "moment",
            centre=args.c or 0.0, jobs=args.jobs)
    else:
        large_mode = {"large-moment": "moment", "sigma2-over-ell": "sigma2_over_ell",
                      "sigma2-over-width2": "sigma2_over_width2"}[mode]
        grid = asymptotics.LARGE_ELLS
        if args.ell_min is not None or args.ell_max is not None:
            lo = args.ell_min or 10.0
            hi = args.ell_max or 1e4
            grid = np.logspace(math.log10(lo), math.log10(hi), args.points or 4)
        checks = asymptotics.limit_sweep_large(args.family, large_mode, args.p, grid, jobs=args.jobs)
    with _output(args.output) as out:
        asymptotics.write_checks_csv(checks, out)
    if args.tolerance is not None and checks[-1].abs_error > args.tolerance:
        log.error("last point misses its limit by %.3g > %.3g", checks[-1].abs_error, args.tolerance)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_curve(args):
    series = empirical.ingest_returns(args.input, args.schema)
    pts = empirical.truncation_curve(series, args.grid, jobs=args.jobs)
    with _output(args.output) as out:
        empirical.write_curve(pts, out)
    if args.daily:
        with open(args.daily, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["day", "n", "s", "s_pop", "ell", "ratio"])
            for st in empirical.daily_stats(series):
                w.writerow([st.day_id.isoformat(), st.n_i, _fmt(st.s_i), _fmt(st.s_pop_i),
                            _fmt(st.ell_i), _fmt(st.ratio)])
    return EXIT_OK


def cmd_fit(args):
    pts = empirical.read_curve(args.input)
    fit = empirical.fit_power_law(pts, args.ell_min, args.ell_max)
    with _output(args.output) as out:
        out.write(empirical.format_fit(fit))
    if args.figure_data:
        lo, hi = fit.fit_range
        with open(args.figure_data, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["ln_ell", "ln_ratio", "ln_ratio_fit", "in_fit_range"])
            for p in pts:
                if not (p.sigma > 0 and p.ell > 0):
                    continue
                lx = math.log(p.ell)
                w.writerow([_fmt(lx), _fmt(math.log(p.ratio)),
                            _fmt(fit.intercept + fit.slope * lx), int(lo <= p.ell <= hi)])
    return EXIT_NUMERIC if fit.degenerate else EXIT_OK


def cmd_synth(args):
    series = empirical.synthesize_series(args.family, args.ell, args.days, args.per_day, args.seed)
    with _output(args.output) as out:
        empirical.write_returns(series, out)
    return EXIT_OK


def cmd_selftest(args):
    from . import selftest

    ok = True
    with _output(args.output) as out:
        for result in selftest.run_all(quick=args.quick):
            ok &= result.passed
            out.write(result.line() + "\n")
            out.flush()
    return EXIT_OK if ok else EXIT_NUMERIC


# -- parser ------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="trunc-range", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", metavar="verb", parser_class=_Parser)
    sub.required = True

    def verb(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--output", help="write to this file instead of stdout")
        return sp

    def dist_flags(sp):
        sp.add_argument("--family", type=_family, required=True,
                        help=", ".join(f.value for f in FAMILIES))
        sp.add_argument("--a", type=float)
        sp.add_argument("--b", type=float)
        sp.add_argument("--ell", type=float, help="semi-range of a symmetric support")
        sp.add_argument("--symmetric", action="store_true")

    sp = verb("moment", cmd_moment, "p-th moment about c")
    dist_flags(sp)
    sp.add_argument("--c", type=float, help="centre (default: midpoint)")
    sp.add_argument("--p", type=int, required=True)

    sp = verb("variance", cmd_variance, "variance, by both routes when symmetric")
    dist_flags(sp)

    sp = verb("hcurve", cmd_hcurve, "H(l) and sigma/l on a log grid")
    sp.add_argument("--family", type=_family, required=True)
    sp.add_argument("--ell-min", type=float, default=1e-3)
    sp.add_argument("--ell-max", type=float, default=1e2)
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--mode", choices=("closed", "quadrature"), default="closed")
    sp.add_argument("--jobs", type=int, default=1)

    sp = verb("bounds-check", cmd_bounds_check, "fuzz the inequality suite")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--instances", type=int, default=1000)

    sp = verb("limits", cmd_limits, "asymptotic sweeps")
    sp.add_argument("--family", type=_family, required=True)
    sp.add_argument("--mode", required=True,
                    choices=("small-moment", "small-h", "large-moment",
                             "sigma2-over-ell", "sigma2-over-width2"))
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--c", type=float, help="support centre for small-moment sweeps")
    sp.add_argument("--ell-min", type=float)
    sp.add_argument("--ell-max", type=float)
    sp.add_argument("--points", type=int)
    sp.add_argument("--tolerance", type=float,
                    help="fail (exit 2) if the last point misses its target by more")
    sp.add_argument("--jobs", type=int, default=1)

    sp = verb("curve", cmd_curve, "truncation curve of a return series")
    sp.add_argument("--input", required=True)
    sp.add_argument("--schema", choices=("returns", "prices"), default="returns")
    sp.add_argument("--grid", type=int, default=1000)
    sp.add_argument("--daily", help="also write per-day statistics to this CSV")
    sp.add_argument("--jobs", type=int, default=1)

    sp = verb("fit", cmd_fit, "power-law fit of a truncation curve")
    sp.add_argument("--input", required=True)
    sp.add_argument("--ell-min", type=float)
    sp.add_argument("--ell-max", type=float)
    sp.add_argument("--figure-data", help="write log-log points and fitted line to this CSV")

    sp = verb("synth", cmd_synth, "synthetic return series")
    sp.add_argument("--family", type=_family, required=True)
    sp.add_argument("--ell", type=float, required=True)
    sp.add_argument("--days", type=int, default=10)
    sp.add_argument("--per-day", type=int, default=1000)
    sp.add_argument("--seed", type=int, required=True)

    sp = verb("selftest", cmd_selftest, "run the acceptance checks")
    sp.add_argument("--quick", action="store_true", help="smaller Monte Carlo and fuzz sizes")
    return p


def _configure_logging():
    level = os.environ.get("TRUNC_RANGE_LOG", "quiet").strip().lower()
    logging.basicConfig(level=_LEVELS.get(level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def run(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"trunc-range {args.verb}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as exc:
        print(f"trunc-range {args.verb}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
