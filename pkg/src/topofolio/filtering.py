"""Correlation-network filtering.

:func:`tmfg` builds a triangulated maximally filtered graph: a planar,
chordal triangulation with exactly ``3n - 6`` edges, grown greedily by
inserting each remaining vertex into the triangular face where it gains
the most absolute correlation. :func:`sr_ifn` hardens that filter by
bootstrapping the observation rows, building one TMFG per draw, and
keeping only edges whose occurrence frequency across draws exceeds a
confidence level; retained edges carry the full-window correlations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import TooFewAssetsError
from .panels import CorrelationMatrix, ReturnPanel, bootstrap_rows, correlation, correlation_values

__all__ = [
    "FilteredNetwork",
    "SrIfnConfig",
    "tmfg",
    "sr_ifn",
    "edge_occurrence",
    "network_from_occurrence",
    "repetition_seed",
]


@dataclass(frozen=True)
class FilteredNetwork:
    """A sparse weighted graph over assets.

    ``adjacency`` is binary and symmetric with a zero diagonal;
    ``similarity`` holds the retained signed correlations and is
    structurally zero wherever adjacency is zero.
    """

    assets: tuple[str, ...]
    adjacency: np.ndarray
    similarity: np.ndarray

    def __post_init__(self):
        assets = tuple(str(a) for a in self.assets)
        n = len(assets)
        adj = np.asarray(self.adjacency)
        sim = np.asarray(self.similarity, dtype=float)
        if adj.shape != (n, n) or sim.shape != (n, n):
            raise ValueError("adjacency and similarity must be n x n")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if not np.all((adj == 0) | (adj == 1)):
            raise ValueError("adjacency must be binary")
        if np.any(np.diag(adj) != 0):
            raise ValueError("adjacency diagonal must be zero")
        if np.any((sim != 0.0) & (adj == 0)):
            raise ValueError("similarity must be structurally zero off the edge set")
        adj = np.ascontiguousarray(adj.astype(np.int8))
        adj.flags.writeable = False
        sim = np.ascontiguousarray(sim)
        sim.flags.writeable = False
        object.__setattr__(self, "assets", assets)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "similarity", sim)

    @property
    def n(self) -> int:
        return len(self.assets)

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(int)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as (i, j) index pairs with i < j, in lexicographic order."""
        ii, jj = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(i), int(j)) for i, j in zip(ii, jj)]


@dataclass(frozen=True)
class SrIfnConfig:
    """Ensemble parameters: occurrence threshold, draw count, and seed."""

    confidence_level: float = 0.7
    repetitions: int = 100
    base_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.confidence_level <= 1.0:
            raise ValueError("confidence_level must lie in [0, 1]")
        if self.repetitions < 1:
            raise ValueError("repetitions must be a positive integer")
        if self.base_seed < 0:
            raise ValueError("base_seed must be non-negative")


def repetition_seed(base_seed: int, repetition: int) -> int:
    """Deterministic per-repetition bootstrap seed (repetitions start at 1)."""
    return base_seed ^ repetition


def _seed_clique(gain: np.ndarray) -> tuple[int, int, int, int]:
    """Vertex quadruple with the maximum total pairwise gain.

    Exact search. For each anchor pair (i, j), the best completion (k, l)
    maximizes ``gain[k, l] + u[k] + u[l]`` with ``u = gain[i] + gain[j]``,
    evaluated over the flattened upper triangle. Pairs are visited in
    decreasing order of an upper bound (pair gain + two largest u entries
    + the global maximum edge), so the scan stops as soon as the bound
    falls below the best total found. Ties resolve to the
    lexicographically smallest quadruple.
    """
    n = gain.shape[0]
    pi, pj = np.triu_indices(n, 1)
    pair_w = gain[pi, pj]
    w_max = pair_w.max()

    # Bound pre-pass, chunked so the (pairs x n) buffer stays small.
    top2 = np.empty(len(pi))
    step = max(1, int(4_000_000 // max(n, 1)))
    for s in range(0, len(pi), step):
        e = min(len(pi), s + step)
        U = gain[pi[s:e]] + gain[pj[s:e]]
        rows = np.arange(e - s)
        U[rows, pi[s:e]] = -np.inf
        U[rows, pj[s:e]] = -np.inf
        top2[s:e] = np.partition(U, -2, axis=1)[:, -2:].sum(axis=1)
    bound = pair_w + top2 + w_max

    order = np.argsort(-bound, kind="stable")
    best_total = -np.inf
    best_quad: tuple[int, int, int, int] | None = None
    for p in order:
        if bound[p] < best_total and best_quad is not None:
            break
        i, j = int(pi[p]), int(pj[p])
        u = gain[i] + gain[j]
        u[i] = u[j] = -np.inf  # pairs touching the anchors drop out
        flat = pair_w + u[pi] + u[pj]
        q = int(np.argmax(flat))
        total = pair_w[p] + flat[q]
        quad = tuple(sorted((i, j, int(pi[q]), int(pj[q]))))
        if total > best_total or (total == best_total and quad < best_quad):
            best_total = total
            best_quad = quad
    return best_quad  # type: ignore[return-value]


def _insert_vertices(gain: np.ndarray, quad: tuple[int, int, int, int]) -> np.ndarray:
    """Greedy face insertion from a seed 4-clique; returns binary adjacency."""
    n = gain.shape[0]
    adj = np.zeros((n, n), dtype=np.int8)
    for a in quad:
        for b in quad:
            if a != b:
                adj[a, b] = 1

    placed = np.zeros(n, dtype=bool)
    placed[list(quad)] = True

    max_faces = max(3 * n - 8, 4)  # 4 seed faces plus a net 2 per insertion
    face_of_row: list[tuple[int, int, int] | None] = []
    G = np.full((max_faces, n), -np.inf)
    row_max = np.full(max_faces, -np.inf)  # cached best gain per face
    row_arg = np.zeros(max_faces, dtype=np.int64)  # and where it sits

    def rescan(row: int) -> None:
        arg = int(np.argmax(G[row]))
        row_arg[row] = arg
        row_max[row] = G[row, arg]

    def add_face(a: int, b: int, c: int) -> None:
        row = len(face_of_row)
        face_of_row.append((a, b, c))
        g = gain[:, a] + gain[:, b] + gain[:, c]
        g[placed] = -np.inf
        G[row] = g
        rescan(row)

    q = quad
    add_face(q[0], q[1], q[2])
    add_face(q[0], q[1], q[3])
    add_face(q[0], q[2], q[3])
    add_face(q[1], q[2], q[3])

    for _ in range(n - 4):
        n_rows = len(face_of_row)
        top = row_max[:n_rows].max()
        rows = np.flatnonzero(row_max[:n_rows] == top)
        if len(rows) == 1 and np.count_nonzero(G[rows[0]] == top) == 1:
            row = int(rows[0])
            v = int(row_arg[row])
        else:
            # Lowest vertex index wins, then the smallest face triple.
            row, v = min(
                (
                    (int(r), int(c))
                    for r in rows
                    for c in np.flatnonzero(G[r] == top)
                ),
                key=lambda rc: (rc[1], face_of_row[rc[0]]),
            )
        a, b, c = face_of_row[row]  # type: ignore[misc]
        adj[v, [a, b, c]] = 1
        adj[[a, b, c], v] = 1
        placed[v] = True
        G[:n_rows, v] = -np.inf
        G[row] = -np.inf
        row_max[row] = -np.inf
        face_of_row[row] = None
        # Only faces whose cached best sat on the placed vertex went stale.
        for r in np.flatnonzero((row_arg[:n_rows] == v) & (row_max[:n_rows] > -np.inf)):
            rescan(int(r))
        add_face(*sorted((v, a, b)))
        add_face(*sorted((v, a, c)))
        add_face(*sorted((v, b, c)))
    return adj


def _tmfg_adjacency(corr_values: np.ndarray) -> np.ndarray:
    """Binary TMFG adjacency for a correlation matrix (gain = |correlation|)."""
    n = corr_values.shape[0]
    if n < 2:
        raise TooFewAssetsError(n, 2)
    if n < 4:
        # Nothing to filter below the seed-clique size: keep the complete graph.
        adj = np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8)
        return adj
    gain = np.abs(np.asarray(corr_values, dtype=float)).copy()
    np.fill_diagonal(gain, 0.0)
    quad = _seed_clique(gain)
    return _insert_vertices(gain, quad)


def tmfg(corr: CorrelationMatrix) -> FilteredNetwork:
    """Filter a correlation matrix down to its TMFG.

    Edges are scored by absolute correlation; retained similarity entries
    keep the signed input values. The result has exactly ``3n - 6`` edges
    for ``n >= 4`` and is the complete graph for ``n`` of 2 or 3.
    """
    adj = _tmfg_adjacency(corr.values)
    sim = np.where(adj == 1, corr.values, 0.0)
    return FilteredNetwork(corr.assets, adj, sim)


def _occurrence_counts(window: ReturnPanel, config: SrIfnConfig) -> np.ndarray:
    """Sum of bootstrapped TMFG adjacencies over all repetitions."""
    n = len(window.assets)
    counts = np.zeros((n, n), dtype=np.int64)
    for t in range(1, config.repetitions + 1):
        counts += bootstrap_network_adjacency(window, config.base_seed, t)
    return counts


def bootstrap_network_adjacency(window: ReturnPanel, base_seed: int, repetition: int) -> np.ndarray:
    """Adjacency of the TMFG built on one bootstrap draw of the window.

    A column that is constant within the draw contributes zero correlation
    (no dependence signal), so the draw still yields a full triangulation.
    """
    draw = bootstrap_rows(window, repetition_seed(base_seed, repetition))
    corr = correlation_values(draw.returns, draw.assets, zero_degenerate=True)
    return _tmfg_adjacency(corr)


def edge_occurrence(window: ReturnPanel, config: SrIfnConfig) -> np.ndarray:
    """Per-edge occurrence probability across the bootstrap ensemble.

    Entry (i, j) is the fraction of repetitions whose TMFG contains edge
    (i, j); thresholding it strictly at the confidence level reproduces
    :func:`sr_ifn`'s edge set exactly.
    """
    if len(window.assets) < 2:
        raise TooFewAssetsError(len(window.assets), 2)
    counts = _occurrence_counts(window, config)
    occ = counts / float(config.repetitions)
    np.fill_diagonal(occ, 0.0)
    return occ


def network_from_occurrence(
    assets: tuple[str, ...],
    occurrence: np.ndarray,
    full_correlation: np.ndarray,
    confidence_level: float,
) -> FilteredNetwork:
    """Threshold an occurrence matrix (strictly) into a filtered network."""
    adj = (occurrence > confidence_level).astype(np.int8)
    np.fill_diagonal(adj, 0)
    sim = np.where(adj == 1, full_correlation, 0.0)
    return FilteredNetwork(assets, adj, sim)


def sr_ifn(window: ReturnPanel, config: SrIfnConfig) -> FilteredNetwork:
    """Statistically robust filtered network from a return window.

    Bootstraps the window ``repetitions`` times, builds a TMFG per draw,
    and keeps edge (i, j) iff its occurrence frequency strictly exceeds
    ``confidence_level``. Retained similarity values are the correlations
    of the original (un-resampled) window. Deterministic per config.
    """
    full_corr = correlation(window)
    occ = edge_occurrence(window, config)
    return network_from_occurrence(
        window.assets, occ, full_corr.values, config.confidence_level
    )
