"""Limits of truncated moments as the support shrinks or grows.

Rescaled to (0, 1), the truncated law tends to the uniform distribution as
the width goes to zero and to a point mass at 1/2 as it grows without
bound.  The helpers here evaluate the relevant quantities along a grid of
semi-ranges and report how far each point is from its limit.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

from ._quadrature import integrate
from .moments import h_function, mean, variance
from .skewing import SkewingFunction, parse_family, pdf
from .truncated import TruncatedDistribution

__all__ = [
    "LimitCheck",
    "normalized_moment",
    "small_range_target",
    "large_range_target",
    "limit_sweep_small",
    "limit_sweep_large",
    "small_range_second_moment",
    "errors_decreasing",
    "write_checks_csv",
    "LARGE_ELLS",
]

LARGE_ELLS = (10.0, 1e2, 1e3, 1e4)


@dataclass(frozen=True)
class LimitCheck:
    parameter_value: float
    observed: float
    target: float
    abs_error: float

    @classmethod
    def of(cls, parameter_value, observed, target):
        return cls(float(parameter_value), float(observed), float(target),
                   abs(float(observed) - float(target)))


def normalized_moment(d: TruncatedDistribution, p) -> float:
    """``E[((X - a)/(b - a))^p]`` for real ``p > -1``.

    For negative ``p`` the end-point singularity at ``x = a`` is integrated
    with an algebraic weight on the piece touching ``a``.
    """
    p = float(p)
    if not p > -1.0:
        raise ValueError(f"need p > -1, got {p}")
    a, b = d.a, d.b
    w = b - a
    norm = d.norm
    g = d.g
    # split where the density peaks so both pieces are smooth
    split = 0.0 if a < 0.0 < b else 0.5 * (a + b)
    head = integrate(lambda x: pdf(g, x), a, split, weight="alg", wvar=(p, 0.0))
    tail = integrate(lambda x: ((x - a) / w) ** p * pdf(g, x), split, b,
                     points=(0.0,))
    return (head / w**p + tail) / norm


def small_range_target(p) -> float:
    """Uniform limit ``E[U^p] = 1/(p+1)``."""
    return 1.0 / (float(p) + 1.0)


def large_range_target(p) -> float:
    """Point-mass limit ``(1/2)^p``."""
    return 0.5 ** float(p)


def _map(fn, items, jobs):
    items = list(items)
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _small_point(ell, g, mode, p, centre):
    if mode == "h":
        return LimitCheck.of(ell, h_function(g, ell), 1.0 / 3.0)
    d = TruncatedDistribution(g, centre - ell, centre + ell)
    return LimitCheck.of(ell, normalized_moment(d, p), small_range_target(p))


def limit_sweep_small(g, p=2.0, ells=(1.0, 0.1, 0.01, 1e-3), *, mode="moment",
                      centre=0.0, jobs=1):
    """Checks along a decreasing grid of semi-ranges.

    ``mode="moment"`` probes the normalised ``p``-th moment on
    ``(centre - l, centre + l)`` against ``1/(p+1)``; ``mode="h"`` probes
    ``H(l)`` against 1/3 (``p`` and ``centre`` are then ignored).
    """
    g = parse_family(g)
    if mode not in ("moment", "h"):
        raise ValueError(f"mode must be 'moment' or 'h', got {mode!r}")
    ells = [float(x) for x in ells]
    if any(e <= 0 for e in ells) or any(x <= y for x, y in zip(ells, ells[1:])):
        raise ValueError("semi-ranges must be positive and strictly decreasing")
    fn = partial(_small_point, g=g, mode=mode, p=p, centre=centre)
    return _map(fn, ells, jobs)


def _sigma2_over_ell_target(g):
    # only the Cauchy variance grows linearly in l: l/arctan(l) - 1
    return 2.0 / math.pi if g is SkewingFunction.CAUCHY else 0.0


def _large_point(ell, g, mode, p):
    if mode == "moment":
        d = TruncatedDistribution(g, -ell, ell)
        return LimitCheck.of(ell, normalized_moment(d, p), large_range_target(p))
    h = h_function(g, ell)
    if mode == "sigma2_over_ell":
        return LimitCheck.of(ell, ell * h, _sigma2_over_ell_target(g))
    # sigma^2 / (b - a)^2 with b - a = 2l
    return LimitCheck.of(ell, h / 4.0, 0.0)


def limit_sweep_large(g, mode="moment", p=2.0, ells=LARGE_ELLS, *, jobs=1):
    """Checks along an increasing grid of semi-ranges.

    Modes: ``"moment"`` (normalised moment against ``2^-p``),
    ``"sigma2_over_ell"`` (``sigma^2/l``, i.e. ``l H(l)``, against 2/pi for
    Cauchy and 0 otherwise) and ``"sigma2_over_width2"``
    (``sigma^2/(b-a)^2`` against 0).
    """
    g = parse_family(g)
    if mode not in ("moment", "sigma2_over_ell", "sigma2_over_width2"):
        raise ValueError(f"unknown large-range mode {mode!r}")
    fn = partial(_large_point, g=g, mode=mode, p=p)
    return _map(fn, [float(x) for x in ells], jobs)


def small_range_second_moment(g, centre, half_width) -> LimitCheck:
    """``(Var + (mu - a)^2) / (b - a)^2`` on ``(centre - w, centre + w)``; tends to 1/3."""
    d = TruncatedDistribution(g, centre - half_width, centre + half_width)
    mu = mean(d)
    var = variance(d, mu)
    obs = (var + (mu - d.a) ** 2) / (d.b - d.a) ** 2
    return LimitCheck.of(half_width, obs, 1.0 / 3.0)


def errors_decreasing(checks) -> bool:
    errs = [c.abs_error for c in checks]
    return all(y <= x for x, y in zip(errs, errs[1:]))


def write_checks_csv(checks, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["ell", "observed", "target", "abs_error"])
    for c in checks:
        w.writerow([f"{c.parameter_value:.15g}", f"{c.observed:.15g}",
                    f"{c.target:.15g}", f"{c.abs_error:.15g}"])
