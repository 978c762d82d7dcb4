"""Daily OHLC price files, log returns and plot-ready density exports.

Input files follow the Yahoo Finance export layout:
date, open, high, low, close, adj.close, volume
"""

import datetime as dt
import logging
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import norm

from config import settings
from errors import (
    DataFormatError,
    DomainError,
    EmptyResultError,
    InsufficientDataError,
    NonPositiveDataError,
)

logger = logging.getLogger(__name__)

PriceColumn = Literal["open", "high", "low", "close", "adj_close"]
PRICE_COLUMNS: tuple[str, ...] = ("open", "high", "low", "close", "adj_close")
REQUIRED_COLUMNS: tuple[str, ...] = ("date", *PRICE_COLUMNS, "volume")
MISSING_TOKENS = {"", "null", "na", "nan", "n/a", "none"}

_KDE_CHUNK = 2_000_000


class OhlcRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    date: dt.date
    open: float = Field(gt=0)
    high: float = Field(gt=0)
    low: float = Field(gt=0)
    close: float = Field(gt=0)
    adj_close: float = Field(gt=0)
    volume: float | None = None


class OhlcTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    records: list[OhlcRecord]
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def prices(self, column: PriceColumn = "adj_close") -> np.ndarray:
        if column not in PRICE_COLUMNS:
            raise DomainError(f"unknown price column '{column}', expected one of {PRICE_COLUMNS}")
        return np.array([getattr(r, column) for r in self.records], dtype=float)

    def dates(self) -> list[dt.date]:
        return [r.date for r in self.records]


class ReturnSeries(BaseModel):
    model_config = ConfigDict(frozen=True)

    values: list[float]
    dates: list[dt.date] | None = None
    source_column: str = "adj_close"

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def _normalize_header(name: str) -> str:
    return name.strip().lower().replace(" ", "_").replace(".", "_")


def _parse_dates(raw: pd.Series) -> pd.Series:
    parsed = pd.to_datetime(raw, format="ISO8601", errors="coerce")
    fallback = pd.to_datetime(raw, format="%m/%d/%Y", errors="coerce")
    return parsed.fillna(fallback)


def load_ohlc_csv(path: str | Path) -> OhlcTable:
    """Parse a daily OHLC file; rows with a missing price are dropped and counted.

    Row numbers in errors are 0-based data-row indices (the header is not counted).
    """
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    frame.columns = [_normalize_header(c) for c in frame.columns]
    for column in REQUIRED_COLUMNS:
        if column not in frame.columns:
            raise DataFormatError(f"missing column '{column}' in {path}", column=column)

    numeric = {}
    missing = pd.Series(False, index=frame.index)
    for column in (*PRICE_COLUMNS, "volume"):
        cells = frame[column].str.strip()
        is_missing = cells.str.lower().isin(MISSING_TOKENS)
        values = pd.to_numeric(cells.where(~is_missing), errors="coerce")
        bad = values.isna() & ~is_missing
        if bad.any():
            row = int(bad.idxmax())
            raise DataFormatError(f"cannot parse '{cells[row]}' as a number", row=row, column=column)
        if column != "volume":
            missing |= is_missing
            non_positive = (values <= 0) & ~is_missing
            if non_positive.any():
                row = int(non_positive.idxmax())
                raise DataFormatError(f"price {values[row]} is not positive", row=row, column=column)
        numeric[column] = values

    dates = _parse_dates(frame["date"].str.strip())
    if dates.isna().any():
        row = int(dates.isna().idxmax())
        raise DataFormatError(f"cannot parse date '{frame['date'][row]}'", row=row, column="date")

    keep = ~missing
    kept_dates = dates[keep]
    if not kept_dates.is_monotonic_increasing or kept_dates.duplicated().any():
        raise DataFormatError(f"dates in {path} are not strictly increasing", column="date")

    records = [
        OhlcRecord(
            date=kept_dates[i].date(),
            open=numeric["open"][i],
            high=numeric["high"][i],
            low=numeric["low"][i],
            close=numeric["close"][i],
            adj_close=numeric["adj_close"][i],
            volume=None if pd.isna(numeric["volume"][i]) else float(numeric["volume"][i]),
        )
        for i in frame.index[keep]
    ]
    dropped = int(missing.sum())
    if dropped:
        logger.info(f"Dropped {dropped} rows with missing prices from {path}")
    logger.info(f"Loaded {len(records)} records from {path}")
    return OhlcTable(records=records, dropped=dropped)


def log_returns(
    prices: Sequence[float],
    dates: Sequence[dt.date] | None = None,
    source_column: str = "adj_close",
) -> ReturnSeries:
    """values[i] = ln(prices[i+1] / prices[i])."""
    p = np.asarray(prices, dtype=float)
    if p.size < 2:
        raise InsufficientDataError(f"need at least two prices, got {p.size}")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise NonPositiveDataError("prices must be finite and strictly positive")
    values = np.diff(np.log(p))
    return ReturnSeries(
        values=values.tolist(),
        dates=list(dates[1:]) if dates is not None else None,
        source_column=source_column,
    )


def negative_abs_returns(r: ReturnSeries) -> np.ndarray:
    """|v| for every strictly negative return, in order."""
    values = r.array()
    negative = -values[values < 0]
    if negative.size == 0:
        raise EmptyResultError("series has no negative returns")
    return negative


def _kernel_sum(data: np.ndarray, grid: np.ndarray, bandwidth: float, reflect: bool) -> np.ndarray:
    step = max(1, _KDE_CHUNK // data.size)
    out = np.empty(grid.size)
    for start in range(0, grid.size, step):
        x = grid[start : start + step, None]
        total = norm.pdf((x - data[None, :]) / bandwidth).sum(axis=1)
        if reflect:
            total += norm.pdf((x + data[None, :]) / bandwidth).sum(axis=1)
        out[start : start + step] = total
    return out / (data.size * bandwidth)


def _kde_inputs(data, bandwidth, grid) -> tuple[np.ndarray, float, np.ndarray]:
    values = np.asarray(data, dtype=float).ravel()
    if values.size == 0:
        raise InsufficientDataError("kernel density needs at least one observation")
    bandwidth = settings.kde_bandwidth if bandwidth is None else bandwidth
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth}")
    return values, float(bandwidth), np.asarray(grid, dtype=float).ravel()


def kde_boundary_corrected(
    data: Sequence[float],
    grid: Sequence[float],
    *,
    bandwidth: float | None = None,
) -> np.ndarray:
    """Gaussian KDE reflected about 0 for data on [0, inf).

    f(x) = sum_i [K((x - x_i)/h) + K((x + x_i)/h)] / (n h), x >= 0
    """
    values, h, points = _kde_inputs(data, bandwidth, grid)
    if np.any(values < 0):
        raise NonPositiveDataError("boundary-corrected KDE needs non-negative data")
    if np.any(points < 0):
        raise DomainError("boundary-corrected KDE is defined on x >= 0 only")
    return _kernel_sum(values, points, h, reflect=True)


def gaussian_kde_values(
    data: Sequence[float],
    grid: Sequence[float],
    *,
    bandwidth: float | None = None,
) -> np.ndarray:
    """Plain Gaussian KDE with a fixed bandwidth, for two-sided data."""
    values, h, points = _kde_inputs(data, bandwidth, grid)
    return _kernel_sum(values, points, h, reflect=False)


def histogram_density(data: Sequence[float], bins: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Bin centres and density-normalised counts."""
    values = np.asarray(data, dtype=float).ravel()
    if values.size == 0:
        raise InsufficientDataError("histogram needs at least one observation")
    bins = settings.histogram_bins if bins is None else bins
    density, edges = np.histogram(values, bins=bins, density=True)
    return (edges[:-1] + edges[1:]) / 2, density


def write_density_csv(path: str | Path, x: Sequence[float], density: Sequence[float], label: str = "density") -> Path:
    path = Path(path)
    pd.DataFrame({"x": np.asarray(x, dtype=float), label: np.asarray(density, dtype=float)}).to_csv(
        path, index=False, lineterminator="\n"
    )
    logger.info(f"Wrote {len(x)} points to {path}")
    return path
