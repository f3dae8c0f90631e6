"""Skewing functions: symmetric CDFs G with G(-x) = 1 - G(x).

Five standard families are provided.  Every function here accepts a Python
float or a numpy array; scalars come back as floats.

Besides the CDF and density, each family exposes two numerically careful
helpers used throughout the package:

* :func:`cdf_centered` returns ``G(x) - 1/2`` without the cancellation of
  subtracting one half from a value close to it;
* :func:`mass` returns ``G(b) - G(a)`` using tail formulas when both
  endpoints sit on the same side of the origin.
"""

import enum
import math

import numpy as np
from scipy import special

from . import specfun
from ._quadrature import integrate

__all__ = [
    "SkewingFunction",
    "FAMILIES",
    "parse_family",
    "cdf",
    "pdf",
    "cdf_centered",
    "mass",
    "c_closed",
    "c_quadrature",
    "c_minus_half",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2_PI = math.sqrt(2.0 / math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Below this semi-range the printed closed forms lose too many digits to
# cancellation and C(l) is taken from quadrature instead.
SMALL_ELL = 1e-2


class SkewingFunction(str, enum.Enum):
    NORMAL = "normal"
    STUDENT_T2 = "student-t2"
    CAUCHY = "cauchy"
    LAPLACE = "laplace"
    LOGISTIC = "logistic"

    def __str__(self):
        return self.value


FAMILIES = tuple(SkewingFunction)


def parse_family(name) -> SkewingFunction:
    if isinstance(name, SkewingFunction):
        return name
    try:
        return SkewingFunction(str(name).strip().lower())
    except ValueError:
        choices = ", ".join(f.value for f in FAMILIES)
        raise ValueError(f"unknown family {name!r}; expected one of {choices}") from None


def _out(x, value):
    if np.ndim(x) == 0:
        return float(value)
    return value


def _lower_tail(g, x):
    # G(x) for x <= 0, written so that it stays accurate deep in the tail.
    if g is SkewingFunction.NORMAL:
        return special.ndtr(x)
    if g is SkewingFunction.STUDENT_T2:
        r = np.sqrt(x * x + 2.0)
        return 1.0 / ((r - x) * r)
    if g is SkewingFunction.CAUCHY:
        return np.arctan2(1.0, -x) / np.pi
    if g is SkewingFunction.LAPLACE:
        return 0.5 * np.exp(x)
    if g is SkewingFunction.LOGISTIC:
        return special.expit(x)
    raise TypeError(f"not a skewing function: {g!r}")


def cdf(g, x):
    """Skewing-function CDF ``G(x)``."""
    g = parse_family(g)
    x = np.asarray(x, dtype=float)
    t = _lower_tail(g, -np.abs(x))
    return _out(x, np.where(x <= 0.0, t, 1.0 - t))


def cdf_centered(g, x):
    """``G(x) - 1/2``, odd in ``x``."""
    g = parse_family(g)
    x = np.asarray(x, dtype=float)
    if g is SkewingFunction.NORMAL:
        v = 0.5 * special.erf(x / _SQRT2)
    elif g is SkewingFunction.STUDENT_T2:
        v = 0.5 * x / np.sqrt(x * x + 2.0)
    elif g is SkewingFunction.CAUCHY:
        v = np.arctan(x) / np.pi
    elif g is SkewingFunction.LAPLACE:
        v = -0.5 * np.sign(x) * np.expm1(-np.abs(x))
    else:
        v = 0.5 * np.tanh(0.5 * x)
    return _out(x, v)


def pdf(g, x):
    """Density ``G'(x)``."""
    g = parse_family(g)
    x = np.asarray(x, dtype=float)
    if g is SkewingFunction.NORMAL:
        v = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    elif g is SkewingFunction.STUDENT_T2:
        v = (x * x + 2.0) ** -1.5
    elif g is SkewingFunction.CAUCHY:
        v = 1.0 / (np.pi * (1.0 + x * x))
    elif g is SkewingFunction.LAPLACE:
        v = 0.5 * np.exp(-np.abs(x))
    else:
        e = np.exp(-np.abs(x))
        v = e / (1.0 + e) ** 2
    return _out(x, v)


def mass(g, a, b):
    """Probability ``G(b) - G(a)`` of the interval ``(a, b)``."""
    g = parse_family(g)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    upper = _lower_tail(g, -np.maximum(a, 0.0)) - _lower_tail(g, -np.maximum(b, 0.0))
    lower = _lower_tail(g, np.minimum(b, 0.0)) - _lower_tail(g, np.minimum(a, 0.0))
    straddle = cdf_centered(g, b) - cdf_centered(g, a)
    v = np.where(a >= 0.0, upper, np.where(b <= 0.0, lower, straddle))
    return _out(a + b, v)


def _check_ell(ell):
    ell = float(ell)
    if not ell > 0.0 or not math.isfinite(ell):
        raise ValueError(f"semi-range must be a positive finite number, got {ell!r}")
    return ell


def c_minus_half(g, ell, *, epsrel=1e-12):
    """``C(l) - 1/2`` by quadrature of ``(2/l**2) int_0^l y (G(y) - 1/2) dy``.

    Integrating the centred CDF keeps full relative precision as ``l -> 0``
    where ``C(l)`` itself collapses onto one half.
    """
    g = parse_family(g)
    ell = _check_ell(ell)
    # 0 <= G - 1/2 <= 1/2 on [0, l], so l**2/4 bounds the integral.
    val = integrate(lambda y: y * cdf_centered(g, y), 0.0, ell, epsrel=epsrel,
                    scale=0.25 * ell * ell, points=(1.0,))
    return 2.0 * val / (ell * ell)


def c_quadrature(g, ell):
    """``C(l) = (2/l**2) int_0^l y G(y) dy`` evaluated numerically."""
    return 0.5 + c_minus_half(g, ell, epsrel=1e-12)


def _c_normal(ell):
    l2 = ell * ell
    return (ell * (ell + math.exp(-0.5 * l2) * _SQRT_2_PI)
            + (l2 - 1.0) * specfun.erf(ell / _SQRT2)) / (2.0 * l2)


def _c_student_t2(ell):
    l2 = ell * ell
    r = math.sqrt(2.0 + l2)
    inner = 2.0 * ell + ell**3 - 2.0 * r * specfun.arcsinh(ell / _SQRT2)
    return (l2 + math.sqrt(l2 / (2.0 + l2)) * inner / ell) / (2.0 * l2)


def _c_cauchy(ell):
    return (ell * (ell * math.pi - 2.0) + 2.0 * (1.0 + ell * ell) * math.atan(ell)) / (
        2.0 * math.pi * ell * ell)


def _c_laplace(ell):
    # exp(-l) [1 + l + exp(l)(l**2 - 1)] / l**2 with the exponential
    # distributed so large l does not overflow.
    return (ell * ell - 1.0 + (1.0 + ell) * math.exp(-ell)) / (ell * ell)


def _c_logistic(ell):
    log1pexp = ell + math.log1p(math.exp(-ell))
    bracket = math.pi**2 / 12.0 + ell * log1pexp + specfun.dilog_neg_exp(ell)
    return 2.0 * bracket / (ell * ell)


_CLOSED = {
    SkewingFunction.NORMAL: _c_normal,
    SkewingFunction.STUDENT_T2: _c_student_t2,
    SkewingFunction.CAUCHY: _c_cauchy,
    SkewingFunction.LAPLACE: _c_laplace,
    SkewingFunction.LOGISTIC: _c_logistic,
}


def c_closed(g, ell):
    """Closed-form ``C(l)`` for the family.

    For ``l < 1e-2`` the closed forms cancel catastrophically and the value
    comes from :func:`c_quadrature`.
    """
    g = parse_family(g)
    ell = _check_ell(ell)
    if ell < SMALL_ELL:
        return c_quadrature(g, ell)
    return _CLOSED[g](ell)
