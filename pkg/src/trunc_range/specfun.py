"""Special functions used by the closed-form C(l) constants.

Only real arguments are supported.  ``erf`` and ``arcsinh`` delegate to the
C library through :mod:`math`; the dilogarithm has no stdlib counterpart and
is evaluated here with argument transformations plus a short power series.
"""

import math

__all__ = ["erf", "dilog", "dilog_neg_exp", "arcsinh"]

_PI2_6 = math.pi**2 / 6.0

# z**k / k**2 with z <= 1/2 drops below 2**-60 well before this.
_MAX_TERMS = 200


def erf(x: float) -> float:
    """Error function (2/sqrt(pi)) * int_0^x exp(-t**2) dt.

    Saturates to +/-1 for large ``|x|``.
    """
    return math.erf(x)


def arcsinh(x: float) -> float:
    """Inverse hyperbolic sine, log(x + sqrt(x**2 + 1))."""
    return math.asinh(x)


def _li2_series(z: float) -> float:
    # Power series sum z**k / k**2, used only for 0 <= z <= 1/2.
    total = 0.0
    term = z
    for k in range(1, _MAX_TERMS):
        contrib = term / (k * k)
        total += contrib
        if abs(contrib) <= 1e-17 * abs(total):
            break
        term *= z
    return total


def _li2_unit(x: float) -> float:
    # -1 <= x < 0: Landen's identity maps x to x/(x-1) in (0, 1/2].
    z = x / (x - 1.0)
    log1mx = math.log1p(-x)
    return -_li2_series(z) - 0.5 * log1mx * log1mx


def dilog(x: float) -> float:
    """Dilogarithm Li2(x) = -int_0^x log(1 - t)/t dt for real ``x <= 0``.

    Large negative arguments are folded through the inversion formula
    ``Li2(x) + Li2(1/x) = -pi**2/6 - log(-x)**2 / 2`` so no series is ever
    summed outside (0, 1/2].

    >>> round(dilog(-1.0), 12)
    -0.822467033424
    """
    x = float(x)
    if math.isnan(x):
        return math.nan
    if x > 0.0:
        raise ValueError(f"dilog is only implemented for x <= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if x >= -1.0:
        return _li2_unit(x)
    if math.isinf(x):
        return -math.inf
    lg = math.log(-x)
    return -_PI2_6 - 0.5 * lg * lg - _li2_unit(1.0 / x)


def dilog_neg_exp(t: float) -> float:
    """Li2(-exp(t)) without forming ``exp(t)``.

    For ``t > 0`` this is the inversion formula written in terms of ``t``,
    which keeps the value finite long after ``exp(t)`` overflows.
    """
    if t <= 0.0:
        return dilog(-math.exp(t))
    return -_PI2_6 - 0.5 * t * t - _li2_unit(-math.exp(-t))
