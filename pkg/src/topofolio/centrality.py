"""Node centrality measures and their bootstrap ensembles.

Degree centrality and communicability betweenness operate on the binary
adjacency of a filtered network; absolute-correlation centrality operates
on a correlation matrix directly. The bootstrapped variant averages a
measure over the same per-repetition sub-networks the robust filter uses,
so both views of the ensemble stay aligned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import NonSymmetricInputError, SubsetTooSmallError, TooFewAssetsError
from .filtering import (
    FilteredNetwork,
    SrIfnConfig,
    bootstrap_network_adjacency,
    repetition_seed,
)
from .panels import CorrelationMatrix, ReturnPanel, bootstrap_rows, correlation_values

__all__ = [
    "CentralityVector",
    "MEASURES",
    "degree_centrality",
    "matrix_exponential",
    "communicability_betweenness",
    "abs_correlation_centrality",
    "bootstrapped_centrality",
]

MEASURES = ("degree", "cbc", "abs_corr")


@dataclass(frozen=True)
class CentralityVector:
    """Non-negative per-asset scores for one measure."""

    assets: tuple[str, ...]
    measure: str
    scores: np.ndarray

    def __post_init__(self):
        assets = tuple(str(a) for a in self.assets)
        scores = np.asarray(self.scores, dtype=float)
        if scores.shape != (len(assets),):
            raise ValueError("scores length must equal asset count")
        if np.any(scores < 0.0):
            raise ValueError("centrality scores must be non-negative")
        scores = np.ascontiguousarray(scores)
        scores.flags.writeable = False
        object.__setattr__(self, "assets", assets)
        object.__setattr__(self, "scores", scores)

    def score_of(self, asset: str) -> float:
        return float(self.scores[self.assets.index(asset)])


def degree_centrality(net: FilteredNetwork) -> CentralityVector:
    """Edge count per node over the maximum possible, ``k_i / (n - 1)``."""
    if net.n < 2:
        raise TooFewAssetsError(net.n, 2)
    scores = net.degrees / float(net.n - 1)
    return CentralityVector(net.assets, "degree", scores)


def matrix_exponential(values: np.ndarray) -> np.ndarray:
    """Matrix exponential of a symmetric matrix via eigendecomposition."""
    A = np.asarray(values, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSymmetricInputError("input must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-9 * scale:
        raise NonSymmetricInputError("input matrix is not symmetric")
    w, Q = np.linalg.eigh((A + A.T) / 2.0)
    E = (Q * np.exp(w)) @ Q.T
    return (E + E.T) / 2.0


def _component_labels(adjacency: np.ndarray) -> np.ndarray:
    n = adjacency.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int)
    _, labels = connected_components(csr_matrix(adjacency), directed=False)
    return labels


def communicability_betweenness(net: FilteredNetwork) -> CentralityVector:
    """Normalized aggregate drop in communicability when a node's edges vanish.

    For node v, compare ``exp(A)`` with ``exp(A_v)`` where ``A_v`` zeroes
    row and column v, and sum the relative differences over ordered pairs
    (j, k) with j, k distinct from each other and from v. Pairs in
    different components of the graph have zero communicability and are
    excluded. Scores are divided by ``(n-1)^2 - (n-1)`` and clamped at
    zero from below.
    """
    n = net.n
    if n < 3:
        raise TooFewAssetsError(n, 3)
    A = net.adjacency.astype(float)
    expA = matrix_exponential(A)
    labels = _component_labels(net.adjacency)
    connected_pair = labels[:, None] == labels[None, :]
    np.fill_diagonal(connected_pair, False)

    norm = (n - 1) ** 2 - (n - 1)
    degrees = net.degrees
    scores = np.zeros(n)
    for v in range(n):
        if degrees[v] == 0:
            continue  # removing no edges changes nothing
        Av = A.copy()
        Av[v, :] = 0.0
        Av[:, v] = 0.0
        expAv = matrix_exponential(Av)
        mask = connected_pair.copy()
        mask[v, :] = False
        mask[:, v] = False
        raw = float(((expA[mask] - expAv[mask]) / expA[mask]).sum())
        scores[v] = max(raw / norm, 0.0)
    return CentralityVector(net.assets, "cbc", scores)


def abs_correlation_centrality(
    corr: CorrelationMatrix, subset: Iterable[int]
) -> CentralityVector:
    """Sum of absolute pairwise correlations within a subset of assets.

    ``subset`` holds indices into ``corr.assets``; the score of asset i is
    the sum of ``|C[i][j]|`` over the other subset members only.
    """
    idx = sorted(set(int(i) for i in subset))
    if any(i < 0 or i >= corr.n for i in idx):
        raise IndexError("subset index out of range")
    if len(idx) < 2:
        raise SubsetTooSmallError("subset needs at least 2 assets")
    sub = np.abs(corr.values[np.ix_(idx, idx)])
    np.fill_diagonal(sub, 0.0)
    scores = sub.sum(axis=1)
    assets = tuple(corr.assets[i] for i in idx)
    return CentralityVector(assets, "abs_corr", scores)


def _measure_on_repetition(
    window: ReturnPanel, config: SrIfnConfig, measure: str, repetition: int
) -> np.ndarray:
    if measure == "abs_corr":
        draw = bootstrap_rows(window, repetition_seed(config.base_seed, repetition))
        C = np.abs(correlation_values(draw.returns, draw.assets, zero_degenerate=True))
        np.fill_diagonal(C, 0.0)
        return C.sum(axis=1)
    adj = bootstrap_network_adjacency(window, config.base_seed, repetition)
    net = FilteredNetwork(window.assets, adj, adj.astype(float))
    if measure == "degree":
        return degree_centrality(net).scores
    if measure == "cbc":
        return communicability_betweenness(net).scores
    raise ValueError(f"unknown measure {measure!r}; expected one of {MEASURES}")


def bootstrapped_centrality(
    window: ReturnPanel, config: SrIfnConfig, measure: str
) -> CentralityVector:
    """Average a centrality measure over the bootstrap sub-networks.

    Per-repetition seeds match the robust filter's, so the sub-networks
    here are exactly the ensemble members that vote on edge occurrence.
    ``abs_corr`` is evaluated on each draw's correlation matrix over the
    full universe; the graph measures on each draw's TMFG.
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; expected one of {MEASURES}")
    n = len(window.assets)
    total = np.zeros(n)
    for t in range(1, config.repetitions + 1):
        total += _measure_on_repetition(window, config, measure, t)
    return CentralityVector(window.assets, measure, total / config.repetitions)
