"""Price and return panels, correlation estimation, and row bootstrapping.

A :class:`PricePanel` holds dated close prices for a universe of assets;
:func:`log_returns` turns it into a :class:`ReturnPanel` of daily log
returns, which is the observation matrix every downstream network and
backtest operation consumes. Missing prices are carried as NaN; present
prices must be strictly positive so the log return is always defined.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date as Date
from datetime import datetime
from importlib import resources
from typing import Sequence

import numpy as np

from .exceptions import (
    InsufficientHistoryError,
    NonPositivePriceError,
    ParseError,
    TooFewObservationsError,
    ZeroVarianceError,
)

__all__ = [
    "PricePanel",
    "ReturnPanel",
    "CorrelationMatrix",
    "load_prices",
    "log_returns",
    "correlation",
    "constant_columns",
    "bootstrap_rows",
    "sample_prices_path",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


def _check_assets(assets: Sequence[str]) -> tuple[str, ...]:
    assets = tuple(str(a) for a in assets)
    if len(set(assets)) != len(assets):
        raise ValueError("asset identifiers must be unique")
    return assets


def _check_dates(dates: Sequence[Date]) -> tuple[Date, ...]:
    dates = tuple(dates)
    for prev, cur in zip(dates, dates[1:]):
        if cur <= prev:
            raise ValueError(f"dates must be strictly increasing: {prev} >= {cur}")
    return dates


@dataclass(frozen=True)
class PricePanel:
    """Dated close prices, rows are dates and columns are assets.

    Present prices must be strictly positive; NaN marks a missing
    observation (blank cell in the source file).
    """

    dates: tuple[Date, ...]
    assets: tuple[str, ...]
    prices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", _check_dates(self.dates))
        object.__setattr__(self, "assets", _check_assets(self.assets))
        prices = np.asarray(self.prices, dtype=float)
        if prices.shape != (len(self.dates), len(self.assets)):
            raise ValueError(
                f"price matrix shape {prices.shape} does not match "
                f"({len(self.dates)}, {len(self.assets)})"
            )
        present = ~np.isnan(prices)
        if np.any(prices[present] <= 0.0):
            t, i = np.argwhere(present & (prices <= 0.0))[0]
            raise NonPositivePriceError(self.assets[i], self.dates[t])
        object.__setattr__(self, "prices", _freeze(prices))

    @property
    def shape(self) -> tuple[int, int]:
        return self.prices.shape


@dataclass(frozen=True)
class ReturnPanel:
    """Dated daily log returns, one date fewer than the source prices."""

    dates: tuple[Date, ...]
    assets: tuple[str, ...]
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", _check_dates(self.dates))
        object.__setattr__(self, "assets", _check_assets(self.assets))
        returns = np.asarray(self.returns, dtype=float)
        if returns.shape != (len(self.dates), len(self.assets)):
            raise ValueError(
                f"return matrix shape {returns.shape} does not match "
                f"({len(self.dates)}, {len(self.assets)})"
            )
        object.__setattr__(self, "returns", _freeze(returns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.returns.shape

    def rows(self, start: int, stop: int) -> "ReturnPanel":
        """Contiguous date slice [start, stop) as a new panel."""
        return ReturnPanel(self.dates[start:stop], self.assets, self.returns[start:stop])

    def take_assets(self, indices: Sequence[int]) -> "ReturnPanel":
        """Column subset, preserving the given index order."""
        idx = list(indices)
        assets = tuple(self.assets[i] for i in idx)
        return ReturnPanel(self.dates, assets, self.returns[:, idx])

    def complete_asset_indices(self) -> list[int]:
        """Indices of assets with no missing observation in this panel."""
        ok = ~np.isnan(self.returns).any(axis=0)
        return [int(i) for i in np.flatnonzero(ok)]


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pearson correlations: symmetric, unit diagonal, entries in [-1, 1]."""

    assets: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "assets", _check_assets(self.assets))
        values = np.asarray(self.values, dtype=float)
        n = len(self.assets)
        if values.shape != (n, n):
            raise ValueError(f"correlation shape {values.shape} does not match {n} assets")
        if np.max(np.abs(values - values.T), initial=0.0) > 1e-12:
            raise ValueError("correlation matrix is not symmetric within 1e-12")
        if n and not np.allclose(np.diag(values), 1.0, rtol=0.0, atol=1e-12):
            raise ValueError("correlation diagonal must be 1")
        if np.any(np.abs(values) > 1.0 + 1e-12):
            raise ValueError("correlation entries must lie in [-1, 1]")
        object.__setattr__(self, "values", _freeze(values))

    @property
    def n(self) -> int:
        return len(self.assets)


@dataclass(frozen=True)
class PriceFileFormat:
    """Optional overrides for the CSV price format."""

    delimiter: str = ","
    date_format: str | None = None  # None means ISO-8601 via date.fromisoformat

    @classmethod
    def from_sidecar(cls, path) -> "PriceFileFormat":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(
            delimiter=raw.get("delimiter", ","),
            date_format=raw.get("date_format"),
        )


def _parse_date(text: str, fmt: str | None, line: int) -> Date:
    try:
        if fmt is None:
            return Date.fromisoformat(text)
        return datetime.strptime(text, fmt).date()
    except ValueError as exc:
        raise ParseError(f"bad date {text!r} on line {line}: {exc}", line=line, column=1) from None


def load_prices(
    source,
    file_format: PriceFileFormat | None = None,
    start: Date | None = None,
    end: Date | None = None,
) -> PricePanel:
    """Read a UTF-8 CSV price file into a :class:`PricePanel`.

    The first column is ``date`` (ISO-8601 unless the format overrides it),
    remaining columns are one asset each. Blank cells become NaN. A
    non-positive price raises :class:`NonPositivePriceError`; an unparseable
    cell raises :class:`ParseError` with its line and column. Assets with
    fewer than two present prices in the requested range are rejected with
    :class:`InsufficientHistoryError`.
    """
    fmt = file_format or PriceFileFormat()
    with open(source, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=fmt.delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty price file", line=1, column=1) from None
        if len(header) < 2 or header[0].strip().lower() != "date":
            raise ParseError("first column must be 'date' followed by asset columns", line=1, column=1)
        assets = _check_assets(h.strip() for h in header[1:])

        dates: list[Date] = []
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} cells, got {len(row)}", line=line_no, column=len(row)
                )
            day = _parse_date(row[0].strip(), fmt.date_format, line_no)
            if start is not None and day < start:
                continue
            if end is not None and day > end:
                continue
            values = []
            for col, cell in enumerate(row[1:], start=2):
                cell = cell.strip()
                if not cell:
                    values.append(np.nan)
                    continue
                try:
                    price = float(cell)
                except ValueError:
                    raise ParseError(
                        f"bad price {cell!r}", line=line_no, column=col
                    ) from None
                if not np.isfinite(price) or price <= 0.0:
                    raise NonPositivePriceError(assets[col - 2], day)
                values.append(price)
            dates.append(day)
            rows.append(values)

    if not dates:
        raise InsufficientHistoryError(message="no price rows in the requested range")
    prices = np.asarray(rows, dtype=float)
    present_counts = (~np.isnan(prices)).sum(axis=0)
    thin = np.flatnonzero(present_counts < 2)
    if thin.size:
        raise InsufficientHistoryError(assets[int(thin[0])])
    return PricePanel(tuple(dates), assets, prices)


def log_returns(panel: PricePanel) -> ReturnPanel:
    """Daily log returns, ``log(P(t)) - log(P(t-1))`` per asset.

    Missing prices propagate: a return is NaN when either endpoint is NaN.
    """
    if len(panel.dates) < 2:
        raise TooFewObservationsError("log returns need at least 2 dates")
    logp = np.log(panel.prices)
    return ReturnPanel(panel.dates[1:], panel.assets, logp[1:] - logp[:-1])


def correlation(window: ReturnPanel) -> CorrelationMatrix:
    """Pearson correlation matrix of a return window.

    Every asset must have at least two observations and nonzero sample
    variance in the window; missing values are not accepted here (filter
    the universe first).
    """
    values = correlation_values(window.returns, window.assets)
    return CorrelationMatrix(window.assets, values)


def correlation_values(
    returns: np.ndarray,
    assets: Sequence[str] | None = None,
    zero_degenerate: bool = False,
) -> np.ndarray:
    """Pearson correlation of the columns of ``returns``.

    With ``zero_degenerate`` a constant column yields zero correlation
    against everything instead of an error; that is the convention for
    bootstrap draws, where a constant resample carries no dependence signal.
    """
    X = np.asarray(returns, dtype=float)
    s, n = X.shape
    if s < 2:
        raise TooFewObservationsError("correlation needs at least 2 observations")
    if np.isnan(X).any():
        raise ValueError("correlation window contains missing returns")
    constant = constant_columns(X)
    degenerate = np.flatnonzero(constant)
    if degenerate.size and not zero_degenerate:
        name = assets[int(degenerate[0])] if assets is not None else str(int(degenerate[0]))
        raise ZeroVarianceError(name)

    C = np.zeros((n, n))
    ok = np.flatnonzero(~constant)
    if ok.size == 1:
        C[ok[0], ok[0]] = 1.0
    elif ok.size > 1:
        sub = np.corrcoef(X[:, ok], rowvar=False)
        C[np.ix_(ok, ok)] = sub
    C = np.clip((C + C.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(C, 1.0)
    return C


def constant_columns(returns: np.ndarray) -> np.ndarray:
    """Boolean mask of columns whose values never change (zero variance)."""
    X = np.asarray(returns, dtype=float)
    if X.shape[0] == 0:
        return np.zeros(X.shape[1], dtype=bool)
    return np.all(X == X[0:1], axis=0)


def bootstrap_rows(window: ReturnPanel, seed: int) -> ReturnPanel:
    """Resample the window's rows uniformly with replacement.

    Deterministic for a fixed seed; output keeps the window's shape and
    dates (dates label positions, not the drawn observations).
    """
    s = window.returns.shape[0]
    if s == 0:
        raise TooFewObservationsError("cannot bootstrap an empty window")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, s, size=s)
    return ReturnPanel(window.dates, window.assets, window.returns[idx])


def sample_prices_path():
    """Path to the small synthetic price file shipped with the package."""
    return resources.files("topofolio.data") / "sample_prices.csv"
