"""Scikit-learn style estimators over the network filters.

Both estimators fit on an observation matrix X of shape
``(n_observations, n_assets)`` (daily log returns) and expose the learned
sparse network through trailing-underscore attributes, so they compose
with pipelines, cloning, and parameter search from the wider ecosystem.
"""

from __future__ import annotations

from datetime import date as Date

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .filtering import SrIfnConfig, edge_occurrence, network_from_occurrence, tmfg
from .panels import CorrelationMatrix, ReturnPanel, correlation, correlation_values
from .synthetic import business_days

__all__ = ["TMFG", "SRIFN"]


def _as_panel(X) -> ReturnPanel:
    if isinstance(X, ReturnPanel):
        return X
    X = check_array(X, dtype=np.float64, ensure_min_samples=2, ensure_min_features=2)
    assets = tuple(f"x{i}" for i in range(X.shape[1]))
    dates = business_days(Date(2000, 1, 3), X.shape[0])
    return ReturnPanel(dates, assets, X)


class TMFG(BaseEstimator):
    """Planar chordal correlation-network filter.

    ``fit`` estimates the Pearson correlation of the columns of X and
    retains the triangulated maximally filtered graph: ``3n - 6`` edges
    scored by absolute correlation.

    Attributes
    ----------
    network_ : FilteredNetwork
    adjacency_ : ndarray of shape (n_assets, n_assets)
    similarity_ : ndarray of shape (n_assets, n_assets)
    """

    def fit(self, X, y=None):
        panel = _as_panel(X)
        corr = CorrelationMatrix(
            panel.assets, correlation_values(panel.returns, panel.assets)
        )
        return self.fit_from_correlation(corr)

    def fit_from_correlation(self, corr: CorrelationMatrix):
        """Fit directly from a precomputed correlation matrix."""
        self.network_ = tmfg(corr)
        self.assets_ = self.network_.assets
        self.adjacency_ = self.network_.adjacency
        self.similarity_ = self.network_.similarity
        self.n_features_in_ = len(self.assets_)
        return self


class SRIFN(BaseEstimator):
    """Bootstrap-ensembled robust network filter.

    Parameters
    ----------
    confidence_level : float, default=0.7
        Edge occurrence frequency that must be strictly exceeded for an
        edge to survive.
    repetitions : int, default=100
        Number of bootstrap draws.
    base_seed : int, default=0
        Seed from which the per-repetition seeds derive.

    Attributes
    ----------
    network_ : FilteredNetwork
    adjacency_, similarity_, edge_occurrence_ : ndarrays
    peripheral_mask_ : boolean ndarray, True for isolated assets
    """

    def __init__(self, confidence_level=0.7, repetitions=100, base_seed=0):
        self.confidence_level = confidence_level
        self.repetitions = repetitions
        self.base_seed = base_seed

    def fit(self, X, y=None):
        panel = _as_panel(X)
        config = SrIfnConfig(
            confidence_level=self.confidence_level,
            repetitions=self.repetitions,
            base_seed=self.base_seed,
        )
        occurrence = edge_occurrence(panel, config)
        full = correlation(panel)
        self.network_ = network_from_occurrence(
            panel.assets, occurrence, full.values, config.confidence_level
        )
        self.assets_ = self.network_.assets
        self.adjacency_ = self.network_.adjacency
        self.similarity_ = self.network_.similarity
        self.edge_occurrence_ = occurrence
        self.peripheral_mask_ = self.network_.degrees == 0
        self.n_features_in_ = len(self.assets_)
        return self

    def peripheral_assets(self) -> tuple[str, ...]:
        """Isolated assets of the fitted network."""
        check_is_fitted(self, "network_")
        return tuple(a for a, m in zip(self.assets_, self.peripheral_mask_) if m)
