"""Walk-forward backtest engine.

At every rebalance date the engine estimates the robust network on the
trailing lookback window, runs the configured selection and weighting
rules, deducts proportional transaction costs on the turnover against the
drifted previous weights, and then lets the new weights drift buy-and-hold
until the next rebalance. Daily portfolio returns are stored as log
returns, gross and net of fees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date as Date
from typing import Mapping, Sequence

import numpy as np

from .centrality import bootstrapped_centrality
from .exceptions import (
    EmptySelectionError,
    InsufficientHistoryError,
    NegativeWeightError,
    TooFewObservationsError,
    TopofolioError,
    ZeroVarianceError,
)
from .filtering import SrIfnConfig, sr_ifn
from .panels import ReturnPanel, constant_columns, correlation
from .portfolio import (
    PortfolioAllocation,
    equal_weights,
    inverse_centrality_weights,
    select_least_correlated,
    select_random,
)

__all__ = [
    "SELECTIONS",
    "WEIGHTINGS",
    "BacktestConfig",
    "MetricSet",
    "RebalanceRecord",
    "BacktestReport",
    "GridSearchResult",
    "run_backtest",
    "turnover_cost",
    "compute_metrics",
    "grid_search",
    "hold_period_returns",
]

SELECTIONS = ("PTP", "CTP", "RBP", "PBP", "LongHold")
WEIGHTINGS = ("equal", "inv_degree", "inv_cbc", "inv_abscorr")

_MEASURE_OF_WEIGHTING = {
    "inv_degree": "degree",
    "inv_cbc": "cbc",
    "inv_abscorr": "abs_corr",
}

TRADING_DAYS_PER_YEAR = 252


@dataclass(frozen=True)
class BacktestConfig:
    """Engine parameters.

    ``fee_rate`` is the proportional cost per unit of turnover (0.0020
    for 20 basis points). ``start``/``end`` clip the input panel by date.
    The LongHold strategy ignores the selection machinery and holds the
    equally weighted full universe from the first day.
    """

    lookback_days: int = 126
    rebalance_days: int = 84
    fee_rate: float = 0.0020
    selection: str = "PTP"
    weighting: str = "equal"
    sr_ifn: SrIfnConfig = field(default_factory=SrIfnConfig)
    start: Date | None = None
    end: Date | None = None

    def __post_init__(self):
        if self.lookback_days < 2:
            raise ValueError("lookback_days must be at least 2")
        if self.rebalance_days < 1:
            raise ValueError("rebalance_days must be at least 1")
        if self.fee_rate < 0.0:
            raise ValueError("fee_rate must be non-negative")
        if self.selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}")


@dataclass(frozen=True)
class MetricSet:
    """Aggregate performance statistics of a daily log-return series."""

    annualized_return: float
    annualized_stddev: float
    sharpe_ratio: float
    daily_skewness: float
    max_drawdown: float
    mean_portfolio_size: float


@dataclass(frozen=True)
class RebalanceRecord:
    date: Date
    assets: tuple[str, ...]
    weights: tuple[float, ...]
    cost: float
    edge_count: int | None
    fallback: bool = False


@dataclass(frozen=True)
class BacktestReport:
    dates: tuple[Date, ...]
    gross_log: np.ndarray
    net_log: np.ndarray
    rebalances: tuple[RebalanceRecord, ...]
    metrics: MetricSet
    config: BacktestConfig

    def __post_init__(self):
        g = np.ascontiguousarray(np.asarray(self.gross_log, dtype=float))
        n = np.ascontiguousarray(np.asarray(self.net_log, dtype=float))
        g.flags.writeable = False
        n.flags.writeable = False
        object.__setattr__(self, "gross_log", g)
        object.__setattr__(self, "net_log", n)


def turnover_cost(
    previous_weights: Mapping[str, float],
    new_weights: Mapping[str, float],
    fee_rate: float,
) -> float:
    """Proportional cost of moving from drifted to target weights.

    Cost is ``fee_rate`` times the L1 distance between the mappings, with
    absent assets counted at weight zero. Buying an initial portfolio from
    cash therefore costs ``fee_rate * 1``.
    """
    if fee_rate < 0.0:
        raise ValueError("fee_rate must be non-negative")
    for name, mapping in (("previous", previous_weights), ("new", new_weights)):
        for asset, w in mapping.items():
            if w < 0.0:
                raise NegativeWeightError(f"{name} weight of {asset!r} is negative")
    turnover = 0.0
    for asset in set(previous_weights) | set(new_weights):
        turnover += abs(new_weights.get(asset, 0.0) - previous_weights.get(asset, 0.0))
    return fee_rate * turnover


def compute_metrics(
    daily_log_returns: Sequence[float] | np.ndarray,
    portfolio_sizes: Sequence[float] | None = None,
) -> MetricSet:
    """Definition-level statistics of a daily log-return series.

    Annualization multiplies the mean by 252 and the sample standard
    deviation by sqrt(252); Sharpe assumes a zero risk-free rate. Skewness
    is the moment estimator ``m3 / m2**1.5``. Drawdown is measured on the
    compounded value curve against its running maximum.
    """
    r = np.asarray(daily_log_returns, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise TooFewObservationsError("metrics need at least 2 daily returns")
    mean = float(r.mean())
    std = float(r.std(ddof=1))
    if std == 0.0:
        raise ZeroVarianceError("portfolio")
    ann_ret = TRADING_DAYS_PER_YEAR * mean
    ann_std = math.sqrt(TRADING_DAYS_PER_YEAR) * std
    m2 = float(np.mean((r - mean) ** 2))
    m3 = float(np.mean((r - mean) ** 3))
    skew = m3 / m2**1.5
    value = np.exp(np.cumsum(r))
    drawdown = value / np.maximum.accumulate(value) - 1.0
    size = float(np.mean(portfolio_sizes)) if portfolio_sizes else float("nan")
    return MetricSet(
        annualized_return=ann_ret,
        annualized_stddev=ann_std,
        sharpe_ratio=ann_ret / ann_std,
        daily_skewness=skew,
        max_drawdown=float(drawdown.min()),
        mean_portfolio_size=size,
    )


def _metrics_allowing_degenerate(
    net_log: np.ndarray, sizes: Sequence[float]
) -> MetricSet:
    """Engine-side metrics: a never-invested (constant) series is reportable."""
    try:
        return compute_metrics(net_log, sizes)
    except ZeroVarianceError:
        value = np.exp(np.cumsum(net_log))
        drawdown = value / np.maximum.accumulate(value) - 1.0
        return MetricSet(
            annualized_return=TRADING_DAYS_PER_YEAR * float(np.mean(net_log)),
            annualized_stddev=0.0,
            sharpe_ratio=float("nan"),
            daily_skewness=float("nan"),
            max_drawdown=float(drawdown.min()),
            mean_portfolio_size=float(np.mean(sizes)) if len(sizes) else float("nan"),
        )


def hold_period_returns(
    simple_returns: np.ndarray, start_weights: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Buy-and-hold a weight vector through a block of simple returns.

    Returns the daily portfolio simple returns and the drifted weights
    after the final day. Weights are renormalized daily, so they always
    sum to one (self-financing, no cash leg). NaN asset returns count as
    zero (price carried forward).
    """
    R = np.nan_to_num(np.asarray(simple_returns, dtype=float), nan=0.0)
    w = np.asarray(start_weights, dtype=float).copy()
    out = np.empty(R.shape[0])
    for t in range(R.shape[0]):
        out[t] = float(w @ R[t])
        growth = w * (1.0 + R[t])
        total = growth.sum()
        if total > 0.0:
            w = growth / total
    return out, w


def _rbp_seed(base_seed: int, rebalance_ordinal: int) -> int:
    # Disjoint from bootstrap seeds (base_seed ^ t with small t): flip high bits.
    return base_seed ^ ((rebalance_ordinal + 1) << 32)


def _select_and_weight(
    window: ReturnPanel, config: BacktestConfig, rebalance_ordinal: int
) -> tuple[PortfolioAllocation, int]:
    """Run the configured selection and weighting on one lookback window."""
    net = sr_ifn(window, config.sr_ifn)
    degrees = net.degrees
    peripheral = tuple(a for a, d in zip(net.assets, degrees) if d == 0)

    if config.selection == "PTP":
        chosen = peripheral
    elif config.selection == "CTP":
        chosen = tuple(a for a, d in zip(net.assets, degrees) if d > 0)
    elif config.selection == "RBP":
        if not peripheral:
            raise EmptySelectionError("no peripheral assets to size-match")
        chosen = select_random(
            net.assets, len(peripheral), _rbp_seed(config.sr_ifn.base_seed, rebalance_ordinal)
        )
    elif config.selection == "PBP":
        if not peripheral:
            raise EmptySelectionError("no peripheral assets to size-match")
        chosen = select_least_correlated(correlation(window), len(peripheral))
    else:  # pragma: no cover - guarded by config validation
        raise ValueError(config.selection)
    if not chosen:
        raise EmptySelectionError(f"{config.selection} selected no assets")

    strategy = {
        "selection": config.selection,
        "weighting": config.weighting,
        "confidence_level": config.sr_ifn.confidence_level,
        "repetitions": config.sr_ifn.repetitions,
    }
    if config.weighting == "equal":
        alloc = equal_weights(chosen, strategy)
    else:
        measure = _MEASURE_OF_WEIGHTING[config.weighting]
        scores = bootstrapped_centrality(window, config.sr_ifn, measure)
        alloc = inverse_centrality_weights(chosen, scores, strategy)
    return alloc, net.edge_count


def _clip(panel: ReturnPanel, start: Date | None, end: Date | None) -> ReturnPanel:
    lo = 0
    hi = len(panel.dates)
    if start is not None:
        while lo < hi and panel.dates[lo] < start:
            lo += 1
    if end is not None:
        while hi > lo and panel.dates[hi - 1] > end:
            hi -= 1
    return panel.rows(lo, hi)


def run_backtest(returns: ReturnPanel, config: BacktestConfig) -> BacktestReport:
    """Walk the panel forward, rebalancing every ``rebalance_days``.

    The first rebalance happens ``lookback_days`` trading days after the
    panel start; each rebalance date's universe is restricted to assets
    with a complete, non-constant return history over its lookback window.
    If a selection rule comes back empty the previous allocation is held
    for the period (flagged in the rebalance log); an empty selection with
    nothing held yet stays in cash until the next rebalance.
    """
    panel = _clip(returns, config.start, config.end)
    T, n_all = panel.shape
    if config.selection == "LongHold":
        if T < 2:
            raise InsufficientHistoryError(message="LongHold needs at least 2 days")
        first_day = 0
        rebalance_idx: list[int] = []
    else:
        if T < config.lookback_days + config.rebalance_days:
            raise InsufficientHistoryError(
                message=(
                    f"panel has {T} days; needs at least "
                    f"{config.lookback_days + config.rebalance_days}"
                )
            )
        first_day = config.lookback_days
        rebalance_idx = list(range(first_day, T, config.rebalance_days))

    simple = np.expm1(panel.returns)
    out_dates = panel.dates[first_day:]
    gross_log = np.zeros(len(out_dates))
    net_log = np.zeros(len(out_dates))
    records: list[RebalanceRecord] = []
    sizes: list[int] = []

    weights = np.zeros(n_all)  # current drifted weights over the full panel
    asset_index = {a: i for i, a in enumerate(panel.assets)}

    if config.selection == "LongHold":
        complete = panel.complete_asset_indices()
        if not complete:
            raise EmptySelectionError("no asset has a complete history for LongHold")
        chosen = tuple(panel.assets[i] for i in complete)
        alloc = equal_weights(chosen, {"selection": "LongHold", "weighting": "equal"})
        plan: dict[int, tuple[PortfolioAllocation | None, int | None]] = {0: (alloc, None)}
    else:
        plan = {}
        for ordinal, t in enumerate(rebalance_idx):
            window = panel.rows(t - config.lookback_days, t)
            flat = constant_columns(window.returns)
            usable = [i for i in window.complete_asset_indices() if not flat[i]]
            try:
                if len(usable) < 2:
                    raise EmptySelectionError("fewer than 2 usable assets in the window")
                alloc, edge_count = _select_and_weight(
                    window.take_assets(usable), config, ordinal
                )
                plan[t] = (alloc, edge_count)
            except (EmptySelectionError, ZeroVarianceError, TooFewObservationsError):
                plan[t] = (None, None)

    for offset, t in enumerate(range(first_day, T)):
        cost = 0.0
        if t in plan:
            alloc, edge_count = plan[t]
            if alloc is not None:
                target = np.zeros(n_all)
                for a, w in zip(alloc.assets, alloc.weights):
                    target[asset_index[a]] = w
                cost = config.fee_rate * float(np.abs(target - weights).sum())
                weights = target
                records.append(
                    RebalanceRecord(
                        date=panel.dates[t],
                        assets=alloc.assets,
                        weights=tuple(float(w) for w in alloc.weights),
                        cost=cost,
                        edge_count=edge_count,
                    )
                )
            else:
                records.append(
                    RebalanceRecord(
                        date=panel.dates[t],
                        assets=tuple(panel.assets[i] for i in np.flatnonzero(weights)),
                        weights=tuple(float(w) for w in weights[weights > 0]),
                        cost=0.0,
                        edge_count=None,
                        fallback=True,
                    )
                )

        day_simple, weights = hold_period_returns(simple[t : t + 1], weights)
        g = float(day_simple[0])
        gross_log[offset] = math.log1p(g)
        net_log[offset] = gross_log[offset] + math.log1p(-cost)
        sizes.append(int(np.count_nonzero(weights)))

    metrics = _metrics_allowing_degenerate(net_log, sizes)
    return BacktestReport(
        dates=out_dates,
        gross_log=gross_log,
        net_log=net_log,
        rebalances=tuple(records),
        metrics=metrics,
        config=config,
    )


@dataclass(frozen=True)
class GridSearchResult:
    rebalance_grid: tuple[int, ...]
    lookback_grid: tuple[int, ...]
    cells: dict[tuple[int, int], MetricSet]
    failures: dict[tuple[int, int], str]
    long_hold: MetricSet | None
    equal_weight_mean_sharpe: float | None


def grid_search(
    returns: ReturnPanel,
    base: BacktestConfig,
    rebalance_grid: Sequence[int],
    lookback_grid: Sequence[int],
) -> GridSearchResult:
    """One full backtest per (rebalance, lookback) cell.

    A failing cell is recorded with its error message and the sweep
    continues. References: the long-hold benchmark on the same panel and
    the mean Sharpe of the equal-weighted variant across the grid.
    """
    rebalance_grid = tuple(int(x) for x in rebalance_grid)
    lookback_grid = tuple(int(x) for x in lookback_grid)
    if not rebalance_grid or not lookback_grid:
        raise ValueError("grids must be nonempty")

    def sweep(config: BacktestConfig):
        cells: dict[tuple[int, int], MetricSet] = {}
        failures: dict[tuple[int, int], str] = {}
        for rb in rebalance_grid:
            for lb in lookback_grid:
                cfg = replace(config, rebalance_days=rb, lookback_days=lb)
                try:
                    cells[(rb, lb)] = run_backtest(returns, cfg).metrics
                except TopofolioError as exc:
                    failures[(rb, lb)] = str(exc)
        return cells, failures

    cells, failures = sweep(base)
    try:
        long_hold = run_backtest(returns, replace(base, selection="LongHold")).metrics
    except TopofolioError:
        long_hold = None

    if base.weighting == "equal":
        eq_cells = cells
    else:
        eq_cells, _ = sweep(replace(base, weighting="equal"))
    eq_sharpes = [m.sharpe_ratio for m in eq_cells.values()]
    eq_mean = float(np.mean(eq_sharpes)) if eq_sharpes else None

    return GridSearchResult(
        rebalance_grid=rebalance_grid,
        lookback_grid=lookback_grid,
        cells=cells,
        failures=failures,
        long_hold=long_hold,
        equal_weight_mean_sharpe=eq_mean,
    )
