"""Moment and variance inequalities for truncated distributions.

Each checker returns a :class:`BoundReport` holding the bound, the exact
value it constrains, and the signed slack (positive when the inequality
holds with room to spare).
"""

import math
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from scipy import optimize

from .moments import mean, moment_about, variance
from .skewing import FAMILIES
from .truncated import TruncatedDistribution, cdf_truncated

__all__ = [
    "SLACK_TOL",
    "BoundReport",
    "upper_bound_corollary",
    "lower_bound_even",
    "popoviciu_generalized",
    "generalized_popoviciu_check",
    "popoviciu",
    "reverse_popoviciu",
    "FuzzInstance",
    "fuzz_instances",
    "check_instance",
    "run_suite",
]

SLACK_TOL = 1e-10


@dataclass(frozen=True)
class BoundReport:
    bound_value: float
    actual_value: float
    satisfied: bool
    slack: float
    direction: str = "upper"

    @classmethod
    def upper(cls, bound, actual):
        slack = bound - actual
        return cls(bound, actual, slack >= -SLACK_TOL, slack, "upper")

    @classmethod
    def lower(cls, bound, actual):
        slack = actual - bound
        return cls(bound, actual, slack >= -SLACK_TOL, slack, "lower")


def _inside(d, c, name="c"):
    if not d.a < c < d.b:
        raise ValueError(f"{name}={c} must lie strictly inside ({d.a}, {d.b})")


def upper_bound_corollary(d: TruncatedDistribution, c, p, *, actual=None) -> BoundReport:
    """Upper bound on ``E[(X-c)^p]`` from the parity of ``p``.

    even p: (b-c)^p [1 - F(c)] + (a-c)^p F(c)
    odd p:  (b-c)^p [1 - F(c)]
    """
    c = float(c)
    _inside(d, c)
    p = int(p)
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    F = cdf_truncated(d, c)
    bound = (d.b - c) ** p * (1.0 - F)
    if p % 2 == 0:
        bound += (d.a - c) ** p * F
    if actual is None:
        actual = moment_about(d, c, p)
    return BoundReport.upper(bound, actual)


def lower_bound_even(d: TruncatedDistribution, c, p, t, *, actual=None) -> BoundReport:
    """``E[(X-c)^p] >= (t-c)^p [F(b) - F(t)]`` for even ``p`` and ``c < t < b``."""
    c, t, p = float(c), float(t), int(p)
    _inside(d, c)
    if not c < t < d.b:
        raise ValueError(f"t={t} must lie strictly inside (c, b) = ({c}, {d.b})")
    if p < 2 or p % 2:
        raise ValueError(f"p must be a positive even integer, got {p}")
    bound = (t - c) ** p * (1.0 - cdf_truncated(d, t))
    if actual is None:
        actual = moment_about(d, c, p)
    return BoundReport.lower(bound, actual)


def popoviciu_generalized(a, b, p) -> float:
    """Upper bound on ``min_c E[(X-c)^p]``: ``((b-a)/2)^p`` for even p, 0 for odd."""
    a, b, p = float(a), float(b), int(p)
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    return 0.0 if p % 2 else (0.5 * (b - a)) ** p


def _shifted_moment_fn(d, p):
    # E[(X - c)^p] for any c from the moments about the midpoint, which
    # keeps every term O(width^p).
    m = d.midpoint
    mk = [1.0] + [moment_about(d, m, k) for k in range(1, p + 1)]
    binom = [math.comb(p, k) for k in range(p + 1)]

    def f(c):
        h = m - c
        return sum(binom[k] * mk[k] * h ** (p - k) for k in range(p + 1))
    return f


def generalized_popoviciu_check(d: TruncatedDistribution, p, *, grid=101) -> BoundReport:
    """Compare ``min_c E[(X-c)^p]`` with :func:`popoviciu_generalized`.

    The minimum is taken over ``grid`` interior points of (a, b) and then
    refined by golden-section search around the best point.  Any value
    found is an upper estimate of the true minimum, so the check can only
    be harder than the inequality itself.
    """
    p = int(p)
    f = _shifted_moment_fn(d, p)
    cs = d.a + (d.b - d.a) * np.arange(1, grid + 1) / (grid + 1)
    vals = np.array([f(c) for c in cs])
    j = int(np.argmin(vals))
    best = float(vals[j])
    if 0 < j < grid - 1 and vals[j] < vals[j - 1] and vals[j] < vals[j + 1]:
        res = optimize.minimize_scalar(f, bracket=(cs[j - 1], cs[j], cs[j + 1]),
                                       method="golden")
        if d.a < res.x < d.b:
            best = min(best, float(res.fun))
    return BoundReport.upper(popoviciu_generalized(d.a, d.b, p), best)


def popoviciu(d: TruncatedDistribution, *, var=None) -> BoundReport:
    """``Var(X) <= ((b-a)/2)^2``."""
    if var is None:
        var = variance(d)
    return BoundReport.upper((0.5 * (d.b - d.a)) ** 2, var)


def reverse_popoviciu(d: TruncatedDistribution, *, mu=None, var=None) -> BoundReport:
    """``Var(X) >= ((b-mu)/2)^2 [F(b) - F((mu+b)/2)]``."""
    if mu is None:
        mu = mean(d)
    if var is None:
        var = variance(d, mu)
    half = 0.5 * (d.b - mu)
    bound = half * half * (1.0 - cdf_truncated(d, mu + half))
    return BoundReport.lower(bound, var)


@dataclass(frozen=True)
class FuzzInstance:
    dist: TruncatedDistribution
    c: float
    t: float
    p: int


def fuzz_instances(n, seed, *, width_range=(1e-3, 1e3), centre_range=(-5.0, 5.0)) -> List[FuzzInstance]:
    """Random (distribution, c, t, p) tuples cycling through every family.

    Widths are log-uniform over ``width_range``; ``c`` is uniform inside the
    support, ``t`` uniform in (c, b), and ``p`` uniform on {1, 2, 3, 4}.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    lw = np.log10(width_range)
    while len(out) < n:
        g = FAMILIES[len(out) % len(FAMILIES)]
        width = 10.0 ** rng.uniform(*lw)
        centre = rng.uniform(*centre_range)
        a = centre - width * rng.uniform(0.05, 0.95)
        b = a + width
        c = a + width * rng.uniform(0.02, 0.98)
        t = c + (b - c) * rng.uniform(0.02, 0.98)
        p = int(rng.integers(1, 5))
        try:
            d = TruncatedDistribution(g, a, b)
        except ValueError:
            continue
        out.append(FuzzInstance(d, float(c), float(t), p))
    return out


CHECKS = (
    "popoviciu",
    "moment_upper_even",
    "moment_upper_odd",
    "lower_bound_even",
    "generalized_popoviciu",
    "reverse_popoviciu",
)


def check_instance(inst: FuzzInstance) -> Dict[str, BoundReport]:
    d = inst.dist
    mu = mean(d)
    var = variance(d, mu)
    p_even = 2 if inst.p <= 2 else 4
    p_odd = 1 if inst.p <= 2 else 3
    even_moment = moment_about(d, inst.c, p_even)
    return {
        "popoviciu": popoviciu(d, var=var),
        "moment_upper_even": upper_bound_corollary(d, inst.c, p_even, actual=even_moment),
        "moment_upper_odd": upper_bound_corollary(d, inst.c, p_odd),
        "lower_bound_even": lower_bound_even(d, inst.c, p_even, inst.t, actual=even_moment),
        "generalized_popoviciu": generalized_popoviciu_check(d, inst.p),
        "reverse_popoviciu": reverse_popoviciu(d, mu=mu, var=var),
    }


def run_suite(instances) -> Dict[str, List[BoundReport]]:
    """Every check on every instance, grouped by check name."""
    results = {name: [] for name in CHECKS}
    for inst in instances:
        for name, rep in check_instance(inst).items():
            results[name].append(rep)
    return results
