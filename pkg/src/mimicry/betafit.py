"""Maximum-likelihood fit of the co-movement parameter U.

The daily advancing fraction f is modeled as symmetric Beta(U, U):

    p(f) = f^(U-1) * (1-f)^(U-1) / B(U, U),   0 < f < 1.

Large U concentrates the distribution at 1/2 (stocks moving independently);
U below 1 makes it bimodal (stocks moving together).  The whole likelihood
is carried by the statistic T = ln f + ln(1-f), whose window mean together
with the observation count fully determines the fit.

Per-observation log-likelihood and score:

    l(U)/n     = (U-1) * mean_t - (2 ln Gamma(U) - ln Gamma(2U))
    score(U)   = mean_t - (2 psi(U) - 2 psi(2U))

Because 2 psi(U) - 2 psi(2U) is strictly increasing in U, the score is
strictly decreasing and the likelihood has a unique maximum, so the fit
reduces to a bracketed one-dimensional root find.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date

import numpy as np

from .errors import InsufficientDataError
from .specfun import digamma, ln_gamma, trigamma

LN4 = math.log(4.0)

CONVERGED = "converged"
CAPPED_LOW = "capped_low"
CAPPED_HIGH = "capped_high"


@dataclass(frozen=True)
class FitConfig:
    """Caps and tolerance for the U root find."""

    u_min: float = 1e-3
    u_max: float = 1e3
    tol: float = 1e-9  # relative tolerance on U

    def __post_init__(self):
        if not (0.0 < self.u_min < self.u_max):
            raise ValueError("need 0 < u_min < u_max")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")


DEFAULT_FIT_CONFIG = FitConfig()


@dataclass(frozen=True)
class SufficientStats:
    """Everything the Beta(U, U) likelihood needs from a window."""

    n: int
    mean_t: float
    first_date: date | None = None
    last_date: date | None = None


@dataclass(frozen=True)
class ModelFit:
    u_hat: float
    std_err: float
    status: str
    n: int


def sufficient_stats(fractions, dates=None) -> SufficientStats:
    """Reduce a window of advancing fractions to its sufficient statistics.

    All fractions must lie strictly inside (0, 1); upstream clamping is
    responsible for keeping boundary days out.  ``dates``, when given, is the
    window's trading dates and only its first/last entries are recorded.
    """
    f = np.asarray(fractions, dtype=np.float64)
    if f.size < 2:
        raise InsufficientDataError(
            f"need at least 2 fractions, got {f.size}", stage="betafit"
        )
    if np.any(f <= 0.0) or np.any(f >= 1.0):
        raise ValueError("fractions must lie strictly inside (0, 1)")
    mean_t = float(np.mean(np.log(f) + np.log1p(-f)))
    # T peaks at f = 1/2 where T = -ln 4; anything above that is a bug.
    if mean_t > -LN4 + 1e-12:
        raise ValueError(f"mean_t = {mean_t} exceeds the -ln 4 ceiling")
    first = last = None
    if dates is not None:
        ds = list(dates)
        if len(ds) != f.size:
            raise ValueError("dates and fractions length mismatch")
        first, last = ds[0], ds[-1]
    return SufficientStats(n=int(f.size), mean_t=mean_t, first_date=first, last_date=last)


def _check_bounds(u, cfg: FitConfig):
    arr = np.asarray(u, dtype=np.float64)
    if np.any(arr < cfg.u_min) or np.any(arr > cfg.u_max) or not np.all(np.isfinite(arr)):
        raise ValueError(f"u outside [{cfg.u_min}, {cfg.u_max}]")


def log_likelihood(u, stats: SufficientStats, cfg: FitConfig = DEFAULT_FIT_CONFIG):
    """Beta(U, U) log-likelihood of the window at u (scalar or array)."""
    _check_bounds(u, cfg)
    arr = np.asarray(u, dtype=np.float64)
    ln_norm = 2.0 * np.asarray(ln_gamma(arr)) - np.asarray(ln_gamma(2.0 * arr))
    out = stats.n * ((arr - 1.0) * stats.mean_t - ln_norm)
    return float(out) if np.ndim(u) == 0 else out


def score(u, stats: SufficientStats, cfg: FitConfig = DEFAULT_FIT_CONFIG):
    """Per-observation derivative of the log-likelihood in U."""
    _check_bounds(u, cfg)
    arr = np.asarray(u, dtype=np.float64)
    g = 2.0 * np.asarray(digamma(arr)) - 2.0 * np.asarray(digamma(2.0 * arr))
    out = stats.mean_t - g
    return float(out) if np.ndim(u) == 0 else out


def _std_err(u: float, n: int) -> float:
    # observed Fisher information of the n-point window
    info = 2.0 * trigamma(u) - 4.0 * trigamma(2.0 * u)
    return 1.0 / math.sqrt(n * info)


def fit_u_from_stats(stats: SufficientStats, cfg: FitConfig = DEFAULT_FIT_CONFIG) -> ModelFit:
    """Solve score(U) = 0 inside the caps.

    The score is strictly decreasing, so a sign check at the caps settles
    whether the root is interior; if not, the fit is reported as capped
    rather than failed (degenerate windows must not abort a rolling scan).
    Interior roots are bracketed by geometric bisection to the relative
    tolerance in ``cfg`` and polished with one secant interpolation.
    """

    def s(u: float) -> float:
        return stats.mean_t - (2.0 * digamma(u) - 2.0 * digamma(2.0 * u))

    s_hi = s(cfg.u_max)
    if s_hi > 0.0:
        return ModelFit(cfg.u_max, _std_err(cfg.u_max, stats.n), CAPPED_HIGH, stats.n)
    s_lo = s(cfg.u_min)
    if s_lo < 0.0:
        return ModelFit(cfg.u_min, _std_err(cfg.u_min, stats.n), CAPPED_LOW, stats.n)

    lo, hi = cfg.u_min, cfg.u_max
    f_lo, f_hi = s_lo, s_hi
    while hi - lo > cfg.tol * lo:
        mid = math.sqrt(lo * hi)  # bisect in log space: uniform relative progress
        if mid <= lo or mid >= hi:
            break  # bracket at float resolution
        f_mid = s(mid)
        if f_mid == 0.0:
            lo = hi = mid
            f_lo = f_hi = 0.0
            break
        if f_mid > 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    if f_lo == f_hi:
        u_hat = lo
    else:
        u_hat = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        u_hat = min(max(u_hat, lo), hi)
    return ModelFit(u_hat, _std_err(u_hat, stats.n), CONVERGED, stats.n)


def fit_u(fractions, cfg: FitConfig = DEFAULT_FIT_CONFIG, dates=None) -> ModelFit:
    """Fit U to a window of advancing fractions by maximum likelihood."""
    return fit_u_from_stats(sufficient_stats(fractions, dates=dates), cfg)
