"""Daily up/down signs and the advancing-fraction series.

The co-movement observable is sign-based: on each trading day, count how
many tickers closed above their previous close (up) and how many below
(down).  The advancing fraction f_t = ups / (ups + downs) ignores unchanged
prices and missing quotes entirely; days with too few movers are flagged
invalid rather than dropped, so downstream windows can skip them while the
calendar stays intact.

Fractions are clamped into [eps_t, 1 - eps_t] with eps_t = 1/(2 n_t), which
keeps the Beta(U, U) log-likelihood finite on all-up or all-down days while
the clamp width vanishes as the cross-section grows.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from datetime import date

import numpy as np

from .errors import InsufficientDataError
from .ingest import PricePanel, TradingCalendar

UP = 1
DOWN = -1
UNCHANGED = 0
MISSING = -128

DEFAULT_MIN_PARTICIPANTS = 100


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """Per-day, per-ticker movement signs.

    ``signs[t, i]`` describes the move into calendar date t (the panel's
    first date is consumed as the reference and dropped).
    """

    calendar: TradingCalendar
    tickers: tuple[str, ...]
    signs: np.ndarray  # int8, values in {UP, DOWN, UNCHANGED, MISSING}

    def __post_init__(self):
        if self.signs.shape != (len(self.calendar), len(self.tickers)):
            raise ValueError("sign matrix shape does not match calendar x tickers")


@dataclass(frozen=True, eq=False)
class FractionSeries:
    """Daily advancing fractions with participation counts and validity."""

    calendar: TradingCalendar
    fractions: np.ndarray  # float64, NaN on invalid dates
    participants: np.ndarray  # int64, ups + downs
    valid: np.ndarray  # bool

    def __post_init__(self):
        n = len(self.calendar)
        if not (len(self.fractions) == len(self.participants) == len(self.valid) == n):
            raise ValueError("series arrays must match the calendar length")

    def valid_fractions(self) -> np.ndarray:
        return self.fractions[self.valid]

    def valid_dates(self) -> tuple[date, ...]:
        return tuple(d for d, ok in zip(self.calendar, self.valid) if ok)

    def to_csv(self) -> str:
        """Audit export: ``date,fraction,participants,valid`` rows."""
        buf = io.StringIO()
        buf.write("date,fraction,participants,valid\r\n")
        for d, f, n, ok in zip(self.calendar, self.fractions, self.participants, self.valid):
            frac = repr(float(f)) if ok else ""
            buf.write(f"{d.isoformat()},{frac},{int(n)},{'true' if ok else 'false'}\r\n")
        return buf.getvalue()


def daily_signs(panel: PricePanel) -> SignMatrix:
    """Compare consecutive closes per ticker.

    A sign is MISSING exactly when either of the two consecutive prices is
    absent; equality gives UNCHANGED.
    """
    if len(panel.calendar) < 2:
        raise InsufficientDataError(
            "need at least 2 panel dates to compute signs", stage="comovement"
        )
    prev = panel.prices[:-1]
    cur = panel.prices[1:]
    absent = np.isnan(prev) | np.isnan(cur)
    signs = np.full(prev.shape, UNCHANGED, dtype=np.int8)
    with np.errstate(invalid="ignore"):
        signs[cur > prev] = UP
        signs[cur < prev] = DOWN
    signs[absent] = MISSING
    return SignMatrix(
        calendar=TradingCalendar(panel.calendar.dates[1:]),
        tickers=panel.tickers,
        signs=signs,
    )


def fraction_series(
    signs: SignMatrix, min_participants: int = DEFAULT_MIN_PARTICIPANTS
) -> FractionSeries:
    """Advancing fraction per date, clamped away from {0, 1}.

    A date is valid iff at least ``min_participants`` tickers moved
    (unchanged and missing excluded); invalid dates carry NaN.
    """
    if min_participants < 2:
        raise ValueError("min_participants must be at least 2")
    ups = (signs.signs == UP).sum(axis=1)
    downs = (signs.signs == DOWN).sum(axis=1)
    participants = ups + downs
    valid = participants >= min_participants
    fractions = np.full(len(participants), np.nan)
    if valid.any():
        n = participants[valid].astype(np.float64)
        raw = ups[valid].astype(np.float64) / n
        eps = 0.5 / n
        fractions[valid] = np.clip(raw, eps, 1.0 - eps)
    return FractionSeries(
        calendar=signs.calendar,
        fractions=fractions,
        participants=participants.astype(np.int64),
        valid=valid,
    )
