"""Portfolio selection and weighting rules.

Selection returns asset identifier tuples in universe order; weighting
turns a selection into a :class:`PortfolioAllocation` whose weights are
strictly positive and sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .centrality import CentralityVector
from .exceptions import (
    CountExceedsUniverseError,
    EmptySelectionError,
    MissingCentralityError,
)
from .filtering import FilteredNetwork
from .panels import CorrelationMatrix

__all__ = [
    "PortfolioAllocation",
    "select_peripheral",
    "select_central",
    "select_random",
    "select_least_correlated",
    "equal_weights",
    "inverse_centrality_weights",
    "CENTRALITY_FLOOR",
]

# Floor applied to centrality scores before inversion, so isolated (zero
# centrality) assets take the dominant weight instead of dividing by zero.
CENTRALITY_FLOOR = 1e-9


@dataclass(frozen=True)
class PortfolioAllocation:
    """An asset subset with positive weights summing to one."""

    assets: tuple[str, ...]
    weights: np.ndarray
    strategy: dict = field(default_factory=dict)

    def __post_init__(self):
        assets = tuple(str(a) for a in self.assets)
        if len(set(assets)) != len(assets):
            raise ValueError("allocation assets must be unique")
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (len(assets),):
            raise ValueError("one weight per asset required")
        if len(assets) == 0:
            raise EmptySelectionError("allocation cannot be empty")
        if np.any(weights <= 0.0):
            raise ValueError("weights must be strictly positive")
        if abs(float(weights.sum()) - 1.0) > 1e-10:
            raise ValueError("weights must sum to 1 within 1e-10")
        weights = np.ascontiguousarray(weights)
        weights.flags.writeable = False
        object.__setattr__(self, "assets", assets)
        object.__setattr__(self, "weights", weights)

    def as_mapping(self) -> dict[str, float]:
        return {a: float(w) for a, w in zip(self.assets, self.weights)}


def select_peripheral(net: FilteredNetwork) -> tuple[str, ...]:
    """Assets isolated in the network (degree zero, all-zero similarity row)."""
    picked = tuple(a for a, d in zip(net.assets, net.degrees) if d == 0)
    if not picked:
        raise EmptySelectionError(
            "no isolated assets; raise the confidence level or fall back"
        )
    return picked


def select_central(net: FilteredNetwork) -> tuple[str, ...]:
    """Connected assets: the complement of the peripheral selection."""
    picked = tuple(a for a, d in zip(net.assets, net.degrees) if d > 0)
    if not picked:
        raise EmptySelectionError("no connected assets in the network")
    return picked


def select_random(universe: Sequence[str], count: int, seed: int) -> tuple[str, ...]:
    """Uniform subset of ``count`` assets, without replacement, per seed."""
    universe = tuple(universe)
    if count > len(universe):
        raise CountExceedsUniverseError(
            f"requested {count} assets from a universe of {len(universe)}"
        )
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(seed)
    idx = sorted(rng.choice(len(universe), size=count, replace=False).tolist())
    return tuple(universe[i] for i in idx)


def select_least_correlated(corr: CorrelationMatrix, count: int) -> tuple[str, ...]:
    """The ``count`` assets with the lowest total absolute correlation.

    Ranking is over the full universe; ties break by asset index.
    """
    if count > corr.n:
        raise CountExceedsUniverseError(
            f"requested {count} assets from a universe of {corr.n}"
        )
    if count < 0:
        raise ValueError("count must be non-negative")
    totals = np.abs(corr.values).sum(axis=1) - 1.0  # drop the unit diagonal
    order = np.lexsort((np.arange(corr.n), totals))
    picked = sorted(int(i) for i in order[:count])
    return tuple(corr.assets[i] for i in picked)


def equal_weights(subset: Sequence[str], strategy: Mapping | None = None) -> PortfolioAllocation:
    """Weight every selected asset at ``1 / len(subset)``."""
    subset = tuple(subset)
    if not subset:
        raise EmptySelectionError("cannot weight an empty selection")
    w = np.full(len(subset), 1.0 / len(subset))
    return PortfolioAllocation(subset, w, dict(strategy or {"weighting": "equal"}))


def inverse_centrality_weights(
    subset: Sequence[str],
    centrality: CentralityVector,
    strategy: Mapping | None = None,
) -> PortfolioAllocation:
    """Weights proportional to inverse centrality over the subset.

    Scores are floored at :data:`CENTRALITY_FLOOR` before inversion, so a
    zero-centrality asset dominates the allocation rather than dividing
    by zero.
    """
    subset = tuple(subset)
    if not subset:
        raise EmptySelectionError("cannot weight an empty selection")
    lookup = {a: float(s) for a, s in zip(centrality.assets, centrality.scores)}
    missing = [a for a in subset if a not in lookup]
    if missing:
        raise MissingCentralityError(missing[0])
    floored = np.array([max(lookup[a], CENTRALITY_FLOOR) for a in subset])
    inv = 1.0 / floored
    w = inv / inv.sum()
    info = dict(strategy or {})
    info.setdefault("weighting", f"inv_{centrality.measure}")
    return PortfolioAllocation(subset, w, info)
