"""Moments, variance bounds and range asymptotics of truncated distributions
built from skewing functions, plus an empirical sigma-versus-range pipeline
for return series."""

from ._quadrature import QuadratureError
from .asymptotics import LimitCheck, limit_sweep_large, limit_sweep_small, normalized_moment
from .bounds import (
    BoundReport,
    generalized_popoviciu_check,
    lower_bound_even,
    popoviciu,
    popoviciu_generalized,
    reverse_popoviciu,
    upper_bound_corollary,
)
from .empirical import (
    CurvePoint,
    DailyStat,
    PowerLawFit,
    ReturnSeries,
    daily_stats,
    fit_power_law,
    ingest_returns,
    synthesize_series,
    truncation_curve,
)
from .moments import h_function, i_g, mean, moment_about, variance
from .skewing import FAMILIES, SkewingFunction, c_closed, c_quadrature, cdf, parse_family, pdf
from .truncated import (
    ConvergenceError,
    TruncatedDistribution,
    cdf_truncated,
    quantile,
    sample,
    symmetric,
)

__version__ = "0.1.0"
