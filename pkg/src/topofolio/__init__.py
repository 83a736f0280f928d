"""Bootstrap-ensembled correlation network filtering and peripheral portfolios.

The pipeline: load prices, compute log returns, filter the correlation
structure into a statistically robust sparse network, select the isolated
(peripheral) assets, weight them inversely to network centrality, and
evaluate with a walk-forward backtest.
"""

from . import exceptions
from .backtest import (
    BacktestConfig,
    BacktestReport,
    GridSearchResult,
    MetricSet,
    RebalanceRecord,
    compute_metrics,
    grid_search,
    run_backtest,
    turnover_cost,
)
from .centrality import (
    CentralityVector,
    abs_correlation_centrality,
    bootstrapped_centrality,
    communicability_betweenness,
    degree_centrality,
    matrix_exponential,
)
from .estimators import SRIFN, TMFG
from .filtering import (
    FilteredNetwork,
    SrIfnConfig,
    edge_occurrence,
    sr_ifn,
    tmfg,
)
from .panels import (
    CorrelationMatrix,
    PricePanel,
    ReturnPanel,
    bootstrap_rows,
    correlation,
    load_prices,
    log_returns,
    sample_prices_path,
)
from .portfolio import (
    PortfolioAllocation,
    equal_weights,
    inverse_centrality_weights,
    select_central,
    select_least_correlated,
    select_peripheral,
    select_random,
)
from .synthetic import SyntheticSpec, generate_prices, generate_returns

__version__ = "0.1.0"

__all__ = [
    "BacktestConfig",
    "BacktestReport",
    "CentralityVector",
    "CorrelationMatrix",
    "FilteredNetwork",
    "GridSearchResult",
    "MetricSet",
    "PortfolioAllocation",
    "PricePanel",
    "RebalanceRecord",
    "ReturnPanel",
    "SRIFN",
    "SrIfnConfig",
    "SyntheticSpec",
    "TMFG",
    "abs_correlation_centrality",
    "bootstrap_rows",
    "bootstrapped_centrality",
    "communicability_betweenness",
    "compute_metrics",
    "correlation",
    "degree_centrality",
    "edge_occurrence",
    "equal_weights",
    "exceptions",
    "generate_prices",
    "generate_returns",
    "grid_search",
    "inverse_centrality_weights",
    "load_prices",
    "log_returns",
    "matrix_exponential",
    "run_backtest",
    "sample_prices_path",
    "select_central",
    "select_least_correlated",
    "select_peripheral",
    "select_random",
    "sr_ifn",
    "tmfg",
    "turnover_cost",
]
