"""Deterministic factor-model return generator for desk-scale experiments.

Returns follow a linear factor model: each correlated block loads on its
own unit-variance factor, with loadings chosen so the intra-block return
correlation hits the requested target; remaining assets are pure
idiosyncratic noise. Prices compound the generated log returns from a
fixed starting level over synthetic business days.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date as Date
from datetime import timedelta

import numpy as np

from .exceptions import InfeasibleCorrelationError
from .panels import PricePanel, ReturnPanel

__all__ = ["SyntheticSpec", "generate_returns", "generate_prices", "business_days"]


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of a synthetic market.

    ``n_days`` counts return observations; the price panel has one more
    row. ``block_sizes`` and ``block_correlations`` describe the
    correlated groups; assets beyond the blocks are independent.
    ``loading_jitter`` spreads the within-block loadings so pairwise
    correlations become heterogeneous (0 keeps them uniform); a scalar
    applies to every block, a sequence gives one value per block.
    """

    n_assets: int
    n_days: int
    block_sizes: tuple[int, ...] = ()
    block_correlations: tuple[float, ...] = ()
    idio_vol: float = 0.01
    daily_drift: float = 0.0
    loading_jitter: float | tuple[float, ...] = 0.0
    seed: int = 0
    n_factors: int | None = None
    start_date: Date = Date(2010, 1, 4)
    initial_price: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", tuple(int(b) for b in self.block_sizes))
        object.__setattr__(
            self, "block_correlations", tuple(float(r) for r in self.block_correlations)
        )
        if self.n_assets < 1 or self.n_days < 2:
            raise ValueError("need at least 1 asset and 2 days")
        if len(self.block_sizes) != len(self.block_correlations):
            raise ValueError("one correlation target per block required")
        if sum(self.block_sizes) > self.n_assets:
            raise ValueError("block sizes exceed the asset count")
        if any(b < 2 for b in self.block_sizes):
            raise ValueError("blocks need at least 2 assets")
        for rho in self.block_correlations:
            if not 0.0 <= rho < 1.0:
                raise InfeasibleCorrelationError(
                    f"intra-block correlation target {rho} is not realizable"
                )
        if self.idio_vol <= 0.0:
            raise ValueError("idio_vol must be positive")
        jitter = self.loading_jitter
        if isinstance(jitter, (int, float)):
            jitter = (float(jitter),) * len(self.block_sizes)
        else:
            jitter = tuple(float(j) for j in jitter)
            if len(jitter) != len(self.block_sizes):
                raise ValueError("one loading_jitter per block required")
        object.__setattr__(self, "loading_jitter", jitter)
        if any(not 0.0 <= j < 1.0 for j in jitter):
            raise ValueError("loading_jitter values must lie in [0, 1)")
        if self.n_factors is not None and self.n_factors != len(self.block_sizes):
            raise ValueError("n_factors must equal the number of blocks")

    @property
    def n_independent(self) -> int:
        return self.n_assets - sum(self.block_sizes)


def _loadings(spec: SyntheticSpec) -> np.ndarray:
    """Loading matrix (assets x blocks) hitting the correlation targets."""
    k = len(spec.block_sizes)
    L = np.zeros((spec.n_assets, k))
    row = 0
    for b, (size, rho, jitter) in enumerate(
        zip(spec.block_sizes, spec.block_correlations, spec.loading_jitter)
    ):
        lam = spec.idio_vol * np.sqrt(rho / (1.0 - rho)) if rho > 0.0 else 0.0
        if jitter > 0.0 and size > 1:
            spread = 1.0 + jitter * np.linspace(-1.0, 1.0, size)
        else:
            spread = np.ones(size)
        L[row : row + size, b] = lam * spread
        row += size
    return L


def implied_correlation(spec: SyntheticSpec) -> np.ndarray:
    """Population return correlation implied by the factor structure."""
    L = _loadings(spec)
    cov = L @ L.T + (spec.idio_vol**2) * np.eye(spec.n_assets)
    eigs = np.linalg.eigvalsh(cov)
    if eigs.min() < -1e-10:
        raise InfeasibleCorrelationError("implied covariance is not positive semi-definite")
    d = np.sqrt(np.diag(cov))
    return cov / np.outer(d, d)


def business_days(start: Date, count: int) -> tuple[Date, ...]:
    """``count`` consecutive weekdays starting at the first weekday >= start."""
    days = []
    d = start
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return tuple(days)


def generate_returns(spec: SyntheticSpec) -> ReturnPanel:
    """Draw the synthetic daily log returns; deterministic per seed."""
    implied_correlation(spec)  # validates feasibility
    rng = np.random.default_rng(spec.seed)
    L = _loadings(spec)
    factors = rng.standard_normal((spec.n_days, L.shape[1])) if L.shape[1] else np.zeros((spec.n_days, 0))
    noise = rng.standard_normal((spec.n_days, spec.n_assets))
    returns = factors @ L.T + spec.idio_vol * noise + spec.daily_drift
    assets = tuple(f"A{i:03d}" for i in range(spec.n_assets))
    dates = business_days(spec.start_date, spec.n_days + 1)[1:]
    return ReturnPanel(dates, assets, returns)


def generate_prices(spec: SyntheticSpec) -> PricePanel:
    """Compound the synthetic returns into a price panel."""
    panel = generate_returns(spec)
    levels = spec.initial_price * np.exp(
        np.vstack([np.zeros(spec.n_assets), np.cumsum(panel.returns, axis=0)])
    )
    dates = business_days(spec.start_date, spec.n_days + 1)
    return PricePanel(dates, panel.assets, levels)
