"""End-of-day price ingestion.

Parses vendor CSV files into validated records, aligns them onto a common
trading calendar, and produces an immutable price panel.  The contract for
malformed input is explicit: every data row ends up either as a record or
as a diagnostic entry, never silently dropped, so callers can audit
``len(records) + len(diagnostics) == data rows``.

Input format: UTF-8 CSV with a header row; the date, ticker, and
adjusted-close columns are configurable and default to ``date``, ``ticker``,
``adj_close``.  Dates are strict ISO-8601 (YYYY-MM-DD).  Blank lines are
ignored.  The ticker universe comes from a plain-text file, one symbol per
line, ``#`` comments allowed.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyInputError, FormatError, NoDataError

DEFAULT_COLUMNS = {"date": "date", "ticker": "ticker", "adj_close": "adj_close"}


@dataclass(frozen=True)
class PriceRecord:
    ticker: str
    date: date
    adj_close: float

    def __post_init__(self):
        if not self.ticker:
            raise ValueError("ticker must be non-empty")
        if not (math.isfinite(self.adj_close) and self.adj_close > 0.0):
            raise ValueError("adj_close must be a positive finite price")


@dataclass(frozen=True)
class Diagnostic:
    """One rejected or corrected input row."""

    row: int  # 1-based data-row number (header excluded)
    reason: str


@dataclass(frozen=True)
class TradingCalendar:
    """Strictly increasing sequence of trading dates."""

    dates: tuple[date, ...]

    def __post_init__(self):
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise ValueError("calendar dates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.dates)

    def __iter__(self):
        return iter(self.dates)

    def __getitem__(self, i):
        return self.dates[i]


@dataclass(frozen=True, eq=False)
class PricePanel:
    """Date-aligned matrix of adjusted closes; NaN marks a missing quote.

    Immutable after construction (the price matrix is marked read-only), so
    panels are safe to share across concurrent readers.
    """

    calendar: TradingCalendar
    tickers: tuple[str, ...]
    prices: np.ndarray  # float64 [len(calendar), len(tickers)]

    def __post_init__(self):
        if self.prices.shape != (len(self.calendar), len(self.tickers)):
            raise ValueError("price matrix shape does not match calendar x tickers")
        present = self.prices[~np.isnan(self.prices)]
        if present.size and not np.all(present > 0.0):
            raise ValueError("all present prices must be positive")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PricePanel):
            return NotImplemented
        return (
            self.calendar == other.calendar
            and self.tickers == other.tickers
            and np.array_equal(self.prices, other.prices, equal_nan=True)
        )

    def to_csv(self) -> str:
        """Canonical serialization: date-major rows in panel ticker order."""
        buf = io.StringIO()
        buf.write("date,ticker,adj_close\r\n")
        for i, d in enumerate(self.calendar):
            iso = d.isoformat()
            for j, t in enumerate(self.tickers):
                p = self.prices[i, j]
                if not np.isnan(p):
                    buf.write(f"{iso},{t},{p!r}\r\n")
        return buf.getvalue()


@dataclass(frozen=True)
class ParseResult:
    records: list[PriceRecord]
    diagnostics: list[Diagnostic]


@dataclass(frozen=True)
class BuildResult:
    panel: PricePanel
    diagnostics: list[Diagnostic]


@dataclass(frozen=True)
class CoverageReport:
    """Per-ticker presence fractions plus the tickers that fall short."""

    min_coverage: float
    coverage: dict[str, float] = field(default_factory=dict)
    flagged: tuple[str, ...] = ()


def _open_text(source) -> IO[str]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8-sig", newline="")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8-sig"))
    if hasattr(source, "read"):
        head = source.read(0)
        if isinstance(head, bytes):
            return io.TextIOWrapper(source, encoding="utf-8-sig", newline="")
        return source
    raise TypeError(f"unsupported input source: {type(source)!r}")


def parse_eod_csv(
    source, column_map: Mapping[str, str] | None = None
) -> ParseResult:
    """Parse an end-of-day CSV into price records plus diagnostics.

    ``source`` may be a path, raw bytes, or an open file object.  Rows with
    unparseable dates, missing fields, blank tickers, or non-positive prices
    become diagnostics instead of records.  A header that lacks any of the
    configured columns raises :class:`FormatError`; a file that yields no
    valid record at all raises :class:`EmptyInputError`.
    """
    columns = dict(DEFAULT_COLUMNS)
    if column_map:
        unknown = set(column_map) - set(DEFAULT_COLUMNS)
        if unknown:
            raise ValueError(f"unknown column_map keys: {sorted(unknown)}")
        columns.update(column_map)

    fh = _open_text(source)
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("input has no header row", stage="ingest") from None

    index = {}
    for role in ("date", "ticker", "adj_close"):
        name = columns[role]
        try:
            index[role] = header.index(name)
        except ValueError:
            raise FormatError(
                f"header is missing required column {name!r}", stage="ingest"
            ) from None
    i_date, i_ticker, i_price = index["date"], index["ticker"], index["adj_close"]
    width = max(i_date, i_ticker, i_price) + 1

    records: list[PriceRecord] = []
    diagnostics: list[Diagnostic] = []
    date_cache: dict[str, date] = {}
    row_no = 0
    for row in reader:
        if not row:
            continue  # blank line, not a data row
        row_no += 1
        if len(row) < width:
            diagnostics.append(Diagnostic(row_no, f"expected {width} fields, got {len(row)}"))
            continue
        ticker = row[i_ticker].strip()
        if not ticker:
            diagnostics.append(Diagnostic(row_no, "empty ticker"))
            continue
        text = row[i_date].strip()
        d = date_cache.get(text)
        if d is None:
            try:
                d = date.fromisoformat(text)
            except ValueError:
                diagnostics.append(Diagnostic(row_no, f"unparseable date {text!r}"))
                continue
            date_cache[text] = d
        try:
            price = float(row[i_price])
        except ValueError:
            diagnostics.append(Diagnostic(row_no, f"unparseable price {row[i_price]!r}"))
            continue
        if not (math.isfinite(price) and price > 0.0):
            diagnostics.append(Diagnostic(row_no, f"non-positive price {row[i_price]!r}"))
            continue
        records.append(PriceRecord(ticker, d, price))

    if not records:
        raise EmptyInputError("no valid data rows in input", stage="ingest")
    return ParseResult(records, diagnostics)


def build_panel(
    records: Iterable[PriceRecord],
    universe: Sequence[str],
    date_range: tuple[date, date] | None = None,
) -> BuildResult:
    """Align records for a ticker universe onto a derived trading calendar.

    The calendar is every distinct in-range date on which at least one
    universe ticker traded; cells stay NaN where no record exists.  Duplicate
    (date, ticker) pairs resolve last-wins with a diagnostic each.
    """
    tickers = tuple(dict.fromkeys(universe))
    if not tickers:
        raise NoDataError("ticker universe is empty", stage="ingest")
    if date_range is not None and date_range[0] > date_range[1]:
        raise ValueError("date_range start is after its end")
    ticker_set = set(tickers)

    cells: dict[tuple[date, str], float] = {}
    diagnostics: list[Diagnostic] = []
    row_no = 0
    for rec in records:
        row_no += 1
        if rec.ticker not in ticker_set:
            continue
        if date_range is not None and not (date_range[0] <= rec.date <= date_range[1]):
            continue
        key = (rec.date, rec.ticker)
        if key in cells:
            diagnostics.append(
                Diagnostic(row_no, f"duplicate ({rec.date.isoformat()}, {rec.ticker}): last wins")
            )
        cells[key] = rec.adj_close

    if not cells:
        raise NoDataError("no in-range records for any universe ticker", stage="ingest")

    calendar = TradingCalendar(tuple(sorted({d for d, _ in cells})))
    date_pos = {d: i for i, d in enumerate(calendar)}
    ticker_pos = {t: j for j, t in enumerate(tickers)}
    prices = np.full((len(calendar), len(tickers)), np.nan)
    for (d, t), p in cells.items():
        prices[date_pos[d], ticker_pos[t]] = p
    prices.setflags(write=False)
    return BuildResult(PricePanel(calendar, tickers, prices), diagnostics)


def validate_panel(panel: PricePanel, min_coverage: float) -> CoverageReport:
    """Report per-ticker coverage; flag tickers below ``min_coverage``.

    Pure report: the panel itself is never modified.
    """
    if not 0.0 <= min_coverage <= 1.0:
        raise ValueError("min_coverage must be within [0, 1]")
    n_dates = len(panel.calendar)
    present = (~np.isnan(panel.prices)).sum(axis=0)
    coverage = {
        t: (present[j] / n_dates if n_dates else 0.0)
        for j, t in enumerate(panel.tickers)
    }
    flagged = tuple(t for t in panel.tickers if coverage[t] < min_coverage)
    return CoverageReport(min_coverage=min_coverage, coverage=coverage, flagged=flagged)


def load_universe(source) -> tuple[str, ...]:
    """Read a ticker universe file: one symbol per line, ``#`` comments."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8-sig")
    elif isinstance(source, (bytes, bytearray)):
        text = source.decode("utf-8-sig")
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8-sig")
    tickers = []
    for line in text.splitlines():
        symbol = line.split("#", 1)[0].strip()
        if symbol:
            tickers.append(symbol)
    if not tickers:
        raise NoDataError("universe file contains no tickers", stage="ingest")
    return tuple(dict.fromkeys(tickers))
