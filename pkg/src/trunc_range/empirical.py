"""Variance-versus-range analysis of return series.

Two views of the same data:

* per-day ratios ``s_i / l_i`` of the daily standard deviation to the
  day's largest absolute return, and
* a truncation curve: for a grid of cut-offs ``l``, the standard deviation
  of the pooled returns with ``|x| <= l``.

The curve's small-``l`` end is fitted by the power law
``sigma/l = zeta^(1/beta) * l^(1/beta - 1)`` via least squares in log-log
coordinates.
"""

import csv
import datetime as dt
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .skewing import parse_family
from .truncated import sample, symmetric

log = logging.getLogger(__name__)

__all__ = [
    "IngestError",
    "ReturnSeries",
    "DailyStat",
    "CurvePoint",
    "PowerLawFit",
    "ingest_returns",
    "write_returns",
    "daily_stats",
    "sample_std",
    "truncation_curve",
    "read_curve",
    "write_curve",
    "default_fit_range",
    "fit_power_law",
    "format_fit",
    "synthesize_series",
]


class IngestError(ValueError):
    """Malformed input; the message carries the offending line number."""


@dataclass(frozen=True)
class ReturnSeries:
    """Returns grouped by day.

    ``days`` holds one date per observation; all observations of a day are
    contiguous and days appear in ascending order.
    """

    days: np.ndarray
    values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def d(self) -> int:
        return len(self.day_ids())

    def day_ids(self) -> List[dt.date]:
        return [dt.date.fromisoformat(str(x)) for x in np.unique(self.days)]

    def groups(self):
        """Yield ``(date, values)`` per day."""
        if self.n == 0:
            return
        cuts = np.flatnonzero(self.days[1:] != self.days[:-1]) + 1
        starts = np.concatenate(([0], cuts))
        ends = np.concatenate((cuts, [self.n]))
        for s, e in zip(starts, ends):
            yield dt.date.fromisoformat(str(self.days[s])), self.values[s:e]


def _open(source):
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        return open(source, newline="")
    return source


def _parse_float(text, lineno, what):
    try:
        v = float(text)
    except ValueError:
        raise IngestError(f"line {lineno}: {what} {text!r} is not a number") from None
    if not math.isfinite(v):
        raise IngestError(f"line {lineno}: {what} must be finite, got {text!r}")
    return v


def ingest_returns(source, schema="returns") -> ReturnSeries:
    """Read a ``day,value`` or ``timestamp,price`` CSV into a :class:`ReturnSeries`.

    Prices become within-day log-returns; the first price of each day only
    serves as a reference, so no return ever spans two days.  Timestamps
    must be non-decreasing inside a day.
    """
    if schema not in ("returns", "prices"):
        raise ValueError(f"schema must be 'returns' or 'prices', got {schema!r}")
    fh = _open(source)
    try:
        rows = list(csv.reader(fh))
    finally:
        if fh is not source:
            fh.close()
    rows = [(i + 1, r) for i, r in enumerate(rows) if r and any(f.strip() for f in r)]
    if not rows:
        raise IngestError("input is empty")
    expected = ["day", "value"] if schema == "returns" else ["timestamp", "price"]
    lineno, header = rows[0]
    if [h.strip().lower() for h in header] != expected:
        raise IngestError(f"line {lineno}: expected header {','.join(expected)}, got {','.join(header)}")
    if len(rows) == 1:
        raise IngestError("input has a header but no data rows")

    by_day = {}
    for lineno, row in rows[1:]:
        if len(row) != 2:
            raise IngestError(f"line {lineno}: expected 2 fields, got {len(row)}")
        key, val = row[0].strip(), row[1].strip()
        if schema == "returns":
            try:
                day = dt.date.fromisoformat(key)
            except ValueError:
                raise IngestError(f"line {lineno}: bad ISO-8601 date {key!r}") from None
            by_day.setdefault(day, []).append(_parse_float(val, lineno, "value"))
            continue
        try:
            stamp = dt.datetime.fromisoformat(key)
        except ValueError:
            raise IngestError(f"line {lineno}: bad ISO-8601 timestamp {key!r}") from None
        price = _parse_float(val, lineno, "price")
        if price <= 0.0:
            raise IngestError(f"line {lineno}: price must be positive, got {val!r}")
        ticks = by_day.setdefault(stamp.date(), [])
        if ticks and stamp < ticks[-1][0]:
            raise IngestError(f"line {lineno}: timestamp {key} goes backwards within its day")
        ticks.append((stamp, price))

    days, values = [], []
    for day in sorted(by_day):
        if schema == "returns":
            vals = by_day[day]
        else:
            prices = np.array([p for _, p in by_day[day]])
            vals = np.diff(np.log(prices)).tolist()
        days.extend([day] * len(vals))
        values.extend(vals)
    return ReturnSeries(np.array(days, dtype="datetime64[D]"), np.array(values, dtype=float))


def write_returns(series: ReturnSeries, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["day", "value"])
    for day, v in zip(series.days, series.values):
        w.writerow([str(day), f"{v:.15g}"])


@dataclass(frozen=True)
class DailyStat:
    day_id: dt.date
    n_i: int
    s_i: float
    s_pop_i: float
    ell_i: float

    @property
    def ratio(self) -> float:
        return self.s_i / self.ell_i

    @property
    def ratio_pop(self) -> float:
        return self.s_pop_i / self.ell_i


def sample_std(x, ddof=1) -> float:
    """Two-pass standard deviation."""
    x = np.asarray(x, dtype=float)
    m = x.sum() / x.size
    return float(np.sqrt(((x - m) ** 2).sum() / (x.size - ddof)))


def daily_stats(series: ReturnSeries) -> List[DailyStat]:
    """Per-day standard deviation and largest absolute return.

    Days with fewer than two returns, or whose returns are all zero, are
    skipped and logged.
    """
    out = []
    for day, x in series.groups():
        if x.size < 2:
            log.warning("skipping %s: %d return(s), need at least 2", day, x.size)
            continue
        ell = float(np.max(np.abs(x)))
        if ell == 0.0:
            log.warning("skipping %s: all returns are zero", day)
            continue
        out.append(DailyStat(day, int(x.size), sample_std(x, 1), sample_std(x, 0), ell))
    return out


@dataclass(frozen=True)
class CurvePoint:
    ell: float
    n_kept: int
    sigma: float
    ratio: float


def _curve_chunk(ells, abs_sorted, s1, s2):
    kept = np.searchsorted(abs_sorted, ells, side="right")
    pts = []
    for ell, k in zip(ells, kept):
        k = int(k)
        if k < 2:
            pts.append(CurvePoint(float(ell), k, math.nan, math.nan))
            continue
        m1 = s1[k - 1] / k
        var = (s2[k - 1] - k * m1 * m1) / (k - 1)
        sigma = math.sqrt(max(var, 0.0))
        pts.append(CurvePoint(float(ell), k, sigma, sigma / float(ell)))
    return pts


def truncation_curve(series: ReturnSeries, grid_size: int = 1000, *, jobs: int = 1) -> List[CurvePoint]:
    """Standard deviation of ``{x : |x| <= l}`` for ``l = m l*/grid_size``.

    ``l*`` is the largest absolute return, so the last point is the
    untruncated sample; it is computed by a direct two-pass formula on the
    original data.  All other points come from one sort and running sums.
    """
    grid_size = int(grid_size)
    if grid_size < 1:
        raise ValueError(f"grid_size must be >= 1, got {grid_size}")
    x = series.values
    if x.size < 2:
        raise ValueError("need at least two returns")
    ell_star = float(np.max(np.abs(x)))
    if ell_star == 0.0:
        raise ValueError("all returns are zero; the truncation grid is empty")

    order = np.argsort(np.abs(x), kind="stable")
    xs = x[order]
    abs_sorted = np.abs(xs)
    # running sums of x and x^2 after removing the overall mean
    centre = x.mean()
    dev = xs - centre
    s1 = np.cumsum(dev)
    s2 = np.cumsum(dev * dev)

    ells = ell_star * (np.arange(1, grid_size + 1) / grid_size)
    chunks = np.array_split(ells, max(1, min(int(jobs), grid_size)))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda e: _curve_chunk(e, abs_sorted, s1, s2), chunks))
    else:
        parts = [_curve_chunk(e, abs_sorted, s1, s2) for e in chunks]
    pts = [p for part in parts for p in part]

    full = sample_std(x, 1)
    pts = [CurvePoint(p.ell, p.n_kept, full, full / p.ell) if p.n_kept == x.size else p
           for p in pts]
    return pts


def write_curve(points: Sequence[CurvePoint], stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["ell", "n_kept", "sigma", "ratio"])
    for p in points:
        w.writerow([f"{p.ell:.15g}", p.n_kept, f"{p.sigma:.15g}", f"{p.ratio:.15g}"])


def read_curve(source) -> List[CurvePoint]:
    fh = _open(source)
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestError("curve file is empty")
        if [h.strip() for h in header] != ["ell", "n_kept", "sigma", "ratio"]:
            raise IngestError(f"line 1: expected header ell,n_kept,sigma,ratio, got {','.join(header)}")
        pts = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise IngestError(f"line {lineno}: expected 4 fields, got {len(row)}")
            try:
                pts.append(CurvePoint(float(row[0]), int(row[1]), float(row[2]), float(row[3])))
            except ValueError:
                raise IngestError(f"line {lineno}: malformed curve row {row!r}") from None
        return pts
    finally:
        if fh is not source:
            fh.close()


@dataclass(frozen=True)
class PowerLawFit:
    beta: float
    zeta: float
    slope: float
    intercept: float
    r_squared: float
    fit_range: Tuple[float, float]
    points_used: int

    @property
    def degenerate(self) -> bool:
        """Slope <= -1 leaves beta undefined."""
        return not self.slope > -1.0


def _usable(curve):
    return sorted((p for p in curve if p.sigma > 0.0 and math.isfinite(p.sigma) and p.ell > 0.0),
                  key=lambda p: p.ell)


def default_fit_range(curve, *, min_points=10) -> Tuple[float, float]:
    """Lowest decade ``[l0, 10 l0]`` holding at least ``min_points`` usable points."""
    ells = [p.ell for p in _usable(curve)]
    for i, e0 in enumerate(ells):
        hi = 10.0 * e0
        if sum(1 for e in ells[i:] if e <= hi) >= min_points:
            return e0, hi
    raise ValueError(f"no decade of the curve holds {min_points} usable points")


def fit_power_law(curve: Sequence[CurvePoint], ell_min: Optional[float] = None,
                  ell_max: Optional[float] = None) -> PowerLawFit:
    """Least-squares fit of ``log(sigma/l) = slope * log(l) + intercept``.

    Then ``beta = 1/(slope + 1)`` and ``zeta = exp(beta * intercept)``.  A
    slope at or below -1 gives a degenerate fit with ``beta`` and ``zeta``
    set to NaN.  Without an explicit range the lowest well-populated decade
    of ``l`` is used.
    """
    if ell_min is None and ell_max is None:
        ell_min, ell_max = default_fit_range(curve)
    lo = -math.inf if ell_min is None else float(ell_min)
    hi = math.inf if ell_max is None else float(ell_max)
    pts = [p for p in _usable(curve) if lo <= p.ell <= hi]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 usable curve points in [{lo}, {hi}], got {len(pts)}")
    lx = np.log([p.ell for p in pts])
    ly = np.log([p.sigma for p in pts]) - lx
    xm, ym = lx.mean(), ly.mean()
    sxx = float(((lx - xm) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("all fit points share one l; slope is undefined")
    slope = float(((lx - xm) * (ly - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    resid = ly - (intercept + slope * lx)
    ss_res = float((resid**2).sum())
    ss_tot = float(((ly - ym) ** 2).sum())
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    if slope > -1.0:
        beta = 1.0 / (slope + 1.0)
        zeta = math.exp(beta * intercept)
    else:
        beta = zeta = math.nan
    return PowerLawFit(beta, zeta, slope, intercept, r2,
                       (min(p.ell for p in pts), max(p.ell for p in pts)), len(pts))


def format_fit(fit: PowerLawFit) -> str:
    lines = [
        f"beta={fit.beta:.15g}",
        f"zeta={fit.zeta:.15g}",
        f"slope={fit.slope:.15g}",
        f"intercept={fit.intercept:.15g}",
        f"r_squared={fit.r_squared:.15g}",
        f"ell_min={fit.fit_range[0]:.15g}",
        f"ell_max={fit.fit_range[1]:.15g}",
        f"points_used={fit.points_used}",
    ]
    if fit.degenerate:
        lines.append("degenerate=true")
    return "\n".join(lines) + "\n"


def synthesize_series(g, ell, days, per_day, seed, *, start=dt.date(2000, 1, 3)) -> ReturnSeries:
    """Seeded draws from the symmetric truncated family, ``per_day`` per day."""
    days, per_day = int(days), int(per_day)
    if days < 1 or per_day < 1:
        raise ValueError("days and per_day must both be >= 1")
    x = sample(symmetric(parse_family(g), ell), days * per_day, seed)
    first = np.datetime64(start, "D")
    day_col = first + np.repeat(np.arange(days), per_day).astype("timedelta64[D]")
    return ReturnSeries(day_col, x)
