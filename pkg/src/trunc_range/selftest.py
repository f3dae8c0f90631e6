"""Acceptance checks, runnable from the CLI (``trunc-range selftest``) and pytest.

Each ``criterion_*`` function returns a :class:`Result`; none of them
raises on a failed check.  Tolerances are fixed here and not configurable.
"""

import hashlib
import math
import os
import tempfile
import time
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sp_integrate
from scipy.stats import norm

from . import asymptotics, bounds, empirical, skewing
from .moments import h_function, moment_about, variance
from .skewing import FAMILIES, mass, pdf
from .truncated import TruncatedDistribution, sample, symmetric


@dataclass
class Result:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number, name):
    def wrap(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            passed, detail = fn(*args, **kwargs)
            return Result(number, name, bool(passed), detail, time.perf_counter() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1, "closed-form C(l) vs quadrature")
def criterion_1():
    """200 log-spaced l in [1e-2, 1e3] per family, relative error <= 1e-8, < 30 s."""
    t0 = time.perf_counter()
    worst = 0.0
    for g in FAMILIES:
        for ell in np.logspace(-2, 3, 200):
            q = skewing.c_quadrature(g, ell)
            worst = max(worst, abs(skewing.c_closed(g, ell) - q) / q)
    elapsed = time.perf_counter() - t0
    return worst <= 1e-8 and elapsed < 30.0, f"max rel err {worst:.2e}, {elapsed:.1f}s"


def direct_moment(d, c, p):
    """``int (x-c)^p dF`` by quadrature of the density, plus ``int |x-c|^p dF``."""
    pts = [0.0] if d.a < 0.0 < d.b else None
    kw = dict(epsabs=0.0, epsrel=1e-13, limit=500, points=pts)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _sp_integrate.IntegrationWarning)
        val = _sp_integrate.quad(lambda x: (x - c) ** p * pdf(d.g, x), d.a, d.b, **kw)[0]
        size = _sp_integrate.quad(lambda x: abs(x - c) ** p * pdf(d.g, x), d.a, d.b, **kw)[0]
    z = mass(d.g, d.a, d.b)
    return val / z, size / z


def moment_fuzz(n, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for i in range(n):
        g = FAMILIES[i % len(FAMILIES)]
        width = 10.0 ** rng.uniform(-2, 2)
        centre = rng.uniform(-5, 5)
        a = centre - width * rng.uniform(0.05, 0.95)
        b = a + width
        c = a + width * rng.uniform(0.02, 0.98)
        p = int(rng.integers(1, 5))
        out.append((TruncatedDistribution(g, a, b), c, p))
    return out


@_timed(2, "moment formula vs direct quadrature")
def criterion_2(n=250):
    """Relative error measured against max(|E(X-c)^p|, E|X-c|^p) so signed moments near 0 stay meaningful."""
    t0 = time.perf_counter()
    worst = 0.0
    for d, c, p in moment_fuzz(n, 20240601):
        ref, size = direct_moment(d, c, p)
        got = moment_about(d, c, p)
        worst = max(worst, abs(got - ref) / max(abs(ref), size))
    elapsed = time.perf_counter() - t0
    return worst <= 1e-8 and elapsed < 60.0, f"{n} instances, max rel err {worst:.2e}, {elapsed:.1f}s"


@_timed(3, "Cauchy l=1 variance = 4/pi - 1")
def criterion_3():
    target = 4.0 / math.pi - 1.0
    v1 = variance(symmetric("cauchy", 1.0))
    v2 = h_function("cauchy", 1.0)
    err = max(abs(v1 - target), abs(v2 - target))
    return err <= 1e-9, f"moment route {v1:.12f}, l^2 H route {v2:.12f}, max err {err:.1e}"


@_timed(4, "truncated normal variance = 1 - 2 l f(l)")
def criterion_4():
    worst = 0.0
    for ell in (0.5, 1.0, 2.0):
        ref = 1.0 - 2.0 * ell * norm.pdf(ell) / (2.0 * norm.cdf(ell) - 1.0)
        worst = max(worst, abs(variance(symmetric("normal", ell)) - ref))
    return worst <= 1e-9, f"max abs err {worst:.1e} over l in {{0.5, 1, 2}}"


@_timed(5, "limits (H -> 1/3, normalised moments, sigma^2/l)")
def criterion_5():
    failures = []
    worst_h = max(abs(h_function(g, 1e-3) - 1.0 / 3.0) for g in FAMILIES)
    if worst_h > 1e-3:
        failures.append(f"H(1e-3) err {worst_h:.2e}")
    worst_small = worst_large = 0.0
    for g in FAMILIES:
        for p in (0.5, 1.0, 2.0, 3.0):
            small = TruncatedDistribution(g, -5e-4, 5e-4)
            worst_small = max(worst_small, abs(asymptotics.normalized_moment(small, p) - 1.0 / (p + 1.0)))
            large = TruncatedDistribution(g, -1e4, 1e4)
            worst_large = max(worst_large, abs(asymptotics.normalized_moment(large, p) - 0.5**p))
    if worst_small > 1e-3:
        failures.append(f"width 1e-3 moment err {worst_small:.2e}")
    if worst_large > 1e-3:
        failures.append(f"width 2e4 moment err {worst_large:.2e}")
    cauchy = 1e4 * h_function("cauchy", 1e4)
    cauchy_err = abs(cauchy - 2.0 / math.pi)
    if cauchy_err > 1e-3:
        failures.append(f"Cauchy sigma^2/l err {cauchy_err:.2e}")
    normal = 1e2 * h_function("normal", 1e2)
    if not normal < 1e-3:
        failures.append(f"Normal sigma^2/l at l=100 is {normal:.6g}, not below 1e-3")
    detail = (f"H err {worst_h:.1e}; small {worst_small:.1e}; large {worst_large:.1e}; "
              f"Cauchy {cauchy_err:.1e}; Normal sigma^2/l(100)={normal:.4g}")
    if failures:
        detail += " -- FAILED: " + "; ".join(failures)
    return not failures, detail


@_timed(6, "inequality suite on fuzzed supports")
def criterion_6(n=1000):
    t0 = time.perf_counter()
    results = bounds.run_suite(bounds.fuzz_instances(n, 7))
    parts = []
    ok = True
    for name, reps in results.items():
        worst = min(r.slack for r in reps)
        ok &= all(r.slack >= -bounds.SLACK_TOL for r in reps)
        parts.append(f"{name} {worst:.1e}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120.0
    return ok, f"{n} instances, min slack: " + ", ".join(parts) + f", {elapsed:.1f}s"


@_timed(7, "Monte Carlo variance at l=1")
def criterion_7(n=10**6):
    parts = []
    ok = True
    for i, g in enumerate(FAMILIES):
        d = symmetric(g, 1.0)
        x = sample(d, n, seed=1000 + i)
        sv = x.var(ddof=1)
        theory = h_function(g, 1.0)
        m4 = moment_about(d, 0.0, 4)
        se = math.sqrt((m4 - theory**2) / n)
        z = (sv - theory) / se
        ok &= abs(z) <= 3.0
        parts.append(f"{g} z={z:+.2f}")
    return ok, ", ".join(parts)


def _small_regime_curve(g, lo=1e-3, hi=1e-2, k=20):
    return [empirical.CurvePoint(e, 0, e * math.sqrt(h_function(g, e)), math.sqrt(h_function(g, e)))
            for e in np.logspace(math.log10(lo), math.log10(hi), k)]


@_timed(8, "empirical curve and power-law fit")
def criterion_8():
    ser = empirical.synthesize_series("student-t2", 5.0, 100, 1000, seed=8)
    curve = empirical.truncation_curve(ser, 50)
    worst_band = 0.0
    for p in curve:
        theory = p.ell * math.sqrt(h_function("student-t2", p.ell))
        band = 3.0 * p.sigma / math.sqrt(2.0 * (p.n_kept - 1))
        worst_band = max(worst_band, abs(p.sigma - theory) / band)
    band_ok = worst_band <= 1.0

    beta, zeta = 2.0, 0.5
    ells = np.logspace(-3, 0, 30)
    exact = [empirical.CurvePoint(e, 0, zeta ** (1 / beta) * e ** (1 / beta),
                                  zeta ** (1 / beta) * e ** (1 / beta - 1)) for e in ells]
    fit = empirical.fit_power_law(exact, 1e-3, 1.0)
    exact_ok = (abs(fit.beta - beta) <= 1e-10 and abs(fit.zeta - zeta) <= 1e-10
                and abs(fit.r_squared - 1.0) <= 1e-12)

    slopes = {}
    for g in FAMILIES:
        f = empirical.fit_power_law(_small_regime_curve(g), 1e-3, 1e-2)
        slopes[g.value] = f.slope
    worst_slope = max(abs(s) for s in slopes.values())
    small_ok = worst_slope <= 0.02
    detail = (f"curve/band max {worst_band:.2f} (<=1); exact fit beta={fit.beta:.12f} "
              f"zeta={fit.zeta:.12f} R2={fit.r_squared:.12f}; small-l max |slope| {worst_slope:.1e}")
    return band_ok and exact_ok and small_ok, detail


@_timed(9, "synth | curve | fit determinism")
def criterion_9():
    from .cli import run

    digests = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            series = os.path.join(tmp, "series.csv")
            curve = os.path.join(tmp, "curve.csv")
            fit = os.path.join(tmp, "fit.txt")
            codes = [
                run(["synth", "--family", "logistic", "--ell", "2", "--days", "20",
                     "--per-day", "500", "--seed", "99", "--output", series]),
                run(["curve", "--input", series, "--output", curve]),
                run(["fit", "--input", curve, "--output", fit]),
            ]
            if any(codes):
                return False, f"exit codes {codes}"
            h = hashlib.sha256()
            for path in (series, curve, fit):
                with open(path, "rb") as fh:
                    h.update(fh.read())
            digests.append(h.hexdigest())
    return digests[0] == digests[1], f"sha256 {digests[0][:16]} vs {digests[1][:16]}"


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9)


def run_all(quick=False):
    """Yield every criterion's result; ``quick`` shrinks the fuzz and Monte Carlo sizes."""
    for crit in CRITERIA:
        if quick and crit is criterion_2:
            yield crit(n=50)
        elif quick and crit is criterion_6:
            yield crit(n=100)
        elif quick and crit is criterion_7:
            yield crit(n=10**5)
        else:
            yield crit()
