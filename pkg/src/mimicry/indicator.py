"""Rolling U fits, the normalized relative-change indicator, and alerts.

``rolling_u`` refits the co-movement parameter on a trailing window of
valid advancing fractions; windows are counted in valid observations, not
calendar days, so data gaps lengthen a window instead of contaminating it.
A U value is attached to each valid date that has a full trailing window.

``relative_change`` turns the U series into the warning indicator R.  Two
normalizations are available:

* ``zscore`` (default): R(t) = (u(t) - u(t - L)) / s(t), where L is the fit
  window length and s(t) is the sample standard deviation of u over the
  trailing baseline.  This is the mode in which the -2 threshold is
  meaningful.
* ``fractional``: R(t) = (u(t) - u(t - L)) / u(t - L).  Kept as an option;
  with positive U it can never reach -2.

``detect_crossings`` reports every first touch of the threshold and the
danger-zone intervals it opens; ``project_drop`` converts an index level
into the crash-magnitude range implied by the 5%-8% single-day band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .betafit import DEFAULT_FIT_CONFIG, FitConfig, ModelFit, fit_u_from_stats, sufficient_stats
from .comovement import FractionSeries
from .errors import InsufficientDataError

MODE_ZSCORE = "zscore"
MODE_FRACTIONAL = "fractional"

DEFAULT_EVENT_DATE = date(2018, 2, 5)


@dataclass(frozen=True)
class AnalysisConfig:
    window_len: int = 81
    baseline_len: int = 252
    threshold: float = -2.0
    mode: str = MODE_ZSCORE
    crash_low: float = 0.05
    crash_high: float = 0.08

    def __post_init__(self):
        if self.window_len < 10:
            raise ValueError("window_len must be at least 10")
        if self.baseline_len <= self.window_len:
            raise ValueError("baseline_len must exceed window_len")
        if self.mode not in (MODE_ZSCORE, MODE_FRACTIONAL):
            raise ValueError(f"unknown indicator mode {self.mode!r}")
        if not (0.0 < self.crash_low < self.crash_high):
            raise ValueError("need 0 < crash_low < crash_high")


DEFAULT_ANALYSIS_CONFIG = AnalysisConfig()


@dataclass(frozen=True, eq=False)
class USeries:
    """Fitted U per date, for the window ending at that date."""

    dates: tuple[date, ...]
    u: np.ndarray
    std_err: np.ndarray
    status: tuple[str, ...]

    def __post_init__(self):
        if not (len(self.dates) == len(self.u) == len(self.std_err) == len(self.status)):
            raise ValueError("series arrays must share one length")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True, eq=False)
class IndicatorSeries:
    """Relative change R per date; NaN where history is insufficient."""

    dates: tuple[date, ...]
    r: np.ndarray
    mode: str

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class AlertReport:
    threshold: float
    crossings: tuple[date, ...] = ()
    intervals: tuple[tuple[date, date], ...] = ()
    projections: tuple[tuple[float, float, float], ...] = ()

    def as_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "crossings": [d.isoformat() for d in self.crossings],
            "intervals": [
                {"entry": a.isoformat(), "exit": b.isoformat()} for a, b in self.intervals
            ],
            "projections": [
                {"index_level": lvl, "low_points": lo, "high_points": hi}
                for lvl, lo, hi in self.projections
            ],
        }


def rolling_u(
    fractions: FractionSeries,
    cfg: AnalysisConfig = DEFAULT_ANALYSIS_CONFIG,
    fit_cfg: FitConfig = DEFAULT_FIT_CONFIG,
) -> USeries:
    """Fit U on every trailing window of ``cfg.window_len`` valid fractions."""
    f = fractions.valid_fractions()
    valid_dates = fractions.valid_dates()
    w = cfg.window_len
    if f.size < w:
        raise InsufficientDataError(
            f"need {w} valid fractions, got {f.size}", stage="indicator"
        )
    t = np.log(f) + np.log1p(-f)
    csum = np.concatenate(([0.0], np.cumsum(t)))
    fits: list[ModelFit] = []
    for j in range(w - 1, f.size):
        stats = sufficient_stats.__wrapped__ if False else None  # placeholder
    del fits, stats
    u = np.empty(f.size - w + 1)
    se = np.empty_like(u)
    status = []
    from .betafit import SufficientStats

    for k, j in enumerate(range(w - 1, f.size)):
        mean_t = (csum[j + 1] - csum[j + 1 - w]) / w
        fit = fit_u_from_stats(
            SufficientStats(
                n=w,
                mean_t=float(mean_t),
                first_date=valid_dates[j + 1 - w],
                last_date=valid_dates[j],
            ),
            fit_cfg,
        )
        u[k] = fit.u_hat
        se[k] = fit.std_err
        status.append(fit.status)
    return USeries(
        dates=tuple(valid_dates[w - 1 :]),
        u=u,
        std_err=se,
        status=tuple(status),
    )


def relative_change(
    u_series: USeries, cfg: AnalysisConfig = DEFAULT_ANALYSIS_CONFIG
) -> IndicatorSeries:
    """Normalized change of U over the window horizon.

    R is NaN wherever its lag or baseline requirement is not met; a zero
    numerator yields R = 0 even when the trailing dispersion is zero
    (constant series), while a nonzero change over zero dispersion stays
    undefined.
    """
    u = np.asarray(u_series.u, dtype=np.float64)
    n = u.size
    lag = cfg.window_len
    if cfg.mode == MODE_FRACTIONAL:
        if n < lag + 1:
            raise InsufficientDataError(
                f"fractional mode needs {lag + 1} U values, got {n}", stage="indicator"
            )
    else:
        if n < cfg.baseline_len:
            raise InsufficientDataError(
                f"zscore mode needs {cfg.baseline_len} U values, got {n}", stage="indicator"
            )
    r = np.full(n, np.nan)
    for i in range(n):
        if i < lag:
            continue
        num = u[i] - u[i - lag]
        if cfg.mode == MODE_FRACTIONAL:
            r[i] = num / u[i - lag]
            continue
        if i < cfg.baseline_len - 1:
            continue
        if num == 0.0:
            r[i] = 0.0
            continue
        s = float(np.std(u[i - cfg.baseline_len + 1 : i + 1], ddof=1))
        if s > 0.0:
            r[i] = num / s
    return IndicatorSeries(dates=u_series.dates, r=r, mode=cfg.mode)


def danger_mask(ind: IndicatorSeries, threshold: float) -> np.ndarray:
    """True where R is defined and at or below the threshold."""
    with np.errstate(invalid="ignore"):
        return np.where(np.isnan(ind.r), False, ind.r <= threshold)


def detect_crossings(
    ind: IndicatorSeries,
    cfg: AnalysisConfig = DEFAULT_ANALYSIS_CONFIG,
    index_levels: tuple[float, ...] = (),
) -> AlertReport:
    """Locate threshold crossings and the danger-zone intervals they open.

    A crossing is the first date of each maximal run of consecutive dates
    with R <= threshold (an undefined R breaks a run).  Intervals are
    (entry, exit) pairs, exit being the last date still in the zone.
    """
    mask = danger_mask(ind, cfg.threshold)
    crossings: list[date] = []
    intervals: list[tuple[date, date]] = []
    start = None
    for i, hot in enumerate(mask):
        if hot and start is None:
            start = i
            crossings.append(ind.dates[i])
        elif not hot and start is not None:
            intervals.append((ind.dates[start], ind.dates[i - 1]))
            start = None
    if start is not None:
        intervals.append((ind.dates[start], ind.dates[-1]))
    projections = tuple(
        (lvl,) + project_drop(lvl, cfg) for lvl in index_levels
    )
    return AlertReport(
        threshold=cfg.threshold,
        crossings=tuple(crossings),
        intervals=tuple(intervals),
        projections=projections,
    )


def project_drop(
    index_level: float, cfg: AnalysisConfig = DEFAULT_ANALYSIS_CONFIG
) -> tuple[float, float]:
    """Crash-magnitude range in index points for a given index level."""
    if not (math.isfinite(index_level) and index_level > 0.0):
        raise ValueError("index_level must be positive")
    return (cfg.crash_low * index_level, cfg.crash_high * index_level)


def points_to_pct(points_drop: float, index_level: float) -> float:
    """Express a raw point drop as a percentage of the index level."""
    if not (math.isfinite(points_drop) and points_drop > 0.0):
        raise ValueError("points_drop must be positive")
    if not (math.isfinite(index_level) and index_level > 0.0):
        raise ValueError("index_level must be positive")
    return 100.0 * points_drop / index_level
