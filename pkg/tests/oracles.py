"""Independent reference implementations used as test oracles.

Everything here is written from the definitions with plain loops, kept
deliberately separate from the library's vectorized code paths.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np


# ---------------------------------------------------------------------------
# market data


def log_returns_elementwise(prices: np.ndarray) -> np.ndarray:
    """Two-pass oracle: take logs, then difference elementwise."""
    T, N = prices.shape
    logs = [[math.log(prices[t][i]) for i in range(N)] for t in range(T)]
    out = np.empty((T - 1, N))
    for t in range(T - 1):
        for i in range(N):
            out[t, i] = logs[t + 1][i] - logs[t][i]
    return out


def pearson_double_loop(X: np.ndarray) -> np.ndarray:
    """Naive double-loop Pearson correlation with explicit moments."""
    s, n = X.shape
    means = [sum(X[:, i]) / s for i in range(n)]
    C = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            xi = X[:, i] - means[i]
            xj = X[:, j] - means[j]
            cov = float(xi @ xj) / (s - 1)
            vi = float(xi @ xi) / (s - 1)
            vj = float(xj @ xj) / (s - 1)
            C[i, j] = C[j, i] = cov / math.sqrt(vi * vj)
    return C


# ---------------------------------------------------------------------------
# TMFG


def tmfg_reference(corr: np.ndarray) -> set[tuple[int, int]]:
    """Step-by-step greedy triangulation with explicit face enumeration.

    Seed: exhaustive search over every vertex quadruple for the maximum
    total pairwise absolute correlation (lexicographically smallest on
    ties). Insertion: scan every (face, vertex) pair each round; gains sum
    the three absolute correlations to the face, computed in ascending
    vertex order. Ties prefer the lowest vertex index then the smallest
    face triple.
    """
    W = np.abs(np.asarray(corr, dtype=float)).copy()
    np.fill_diagonal(W, 0.0)
    n = W.shape[0]
    assert n >= 4

    best_total = -math.inf
    best_quad = None
    for quad in combinations(range(n), 4):
        total = 0.0
        for a, b in combinations(quad, 2):
            total += W[a, b]
        if total > best_total:
            best_total = total
            best_quad = quad

    edges: set[tuple[int, int]] = set()

    def add_edge(a: int, b: int) -> None:
        edges.add((min(a, b), max(a, b)))

    for a, b in combinations(best_quad, 2):
        add_edge(a, b)

    faces = [tuple(sorted(f)) for f in combinations(best_quad, 3)]
    faces.sort()
    remaining = [v for v in range(n) if v not in best_quad]

    while remaining:
        best = None  # (gain, vertex, face)
        for face in sorted(faces):
            a, b, c = face
            for v in remaining:
                gain = (W[v, a] + W[v, b]) + W[v, c]
                if (
                    best is None
                    or gain > best[0]
                    or (gain == best[0] and (v, face) < (best[1], best[2]))
                ):
                    best = (gain, v, face)
        _, v, face = best
        a, b, c = face
        add_edge(v, a)
        add_edge(v, b)
        add_edge(v, c)
        faces.remove(face)
        faces.append(tuple(sorted((v, a, b))))
        faces.append(tuple(sorted((v, a, c))))
        faces.append(tuple(sorted((v, b, c))))
        remaining.remove(v)
    return edges


def is_chordal_mcs(adjacency: np.ndarray) -> bool:
    """Chordality via maximum cardinality search.

    MCS visits vertices by decreasing count of visited neighbors; the
    reverse visit order is a perfect elimination ordering iff the graph
    is chordal, which holds iff every vertex's earlier-visited neighbors
    form a clique.
    """
    A = np.asarray(adjacency)
    n = A.shape[0]
    visited = [False] * n
    weight = [0] * n
    pos = [0] * n
    for step in range(n):
        v = max(
            (u for u in range(n) if not visited[u]),
            key=lambda u: (weight[u], -u),
        )
        visited[v] = True
        pos[v] = step
        for u in range(n):
            if A[v, u] and not visited[u]:
                weight[u] += 1
    for v in range(n):
        earlier = [u for u in range(n) if A[v, u] and pos[u] < pos[v]]
        for a, b in combinations(earlier, 2):
            if not A[a, b]:
                return False
    return True


# ---------------------------------------------------------------------------
# centrality


def taylor_expm(A: np.ndarray, terms: int = 40) -> np.ndarray:
    """Truncated power series for the matrix exponential."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, terms + 1):
        term = term @ A / k
        out = out + term
    return out


def cbc_reference(adjacency: np.ndarray) -> np.ndarray:
    """Communicability betweenness from the definition with taylor_expm."""
    A = np.asarray(adjacency, dtype=float)
    n = A.shape[0]
    G = taylor_expm(A)
    norm = (n - 1) ** 2 - (n - 1)
    scores = np.zeros(n)
    for v in range(n):
        Av = A.copy()
        Av[v, :] = 0.0
        Av[:, v] = 0.0
        Gv = taylor_expm(Av)
        raw = 0.0
        for j in range(n):
            for k in range(n):
                if j == k or j == v or k == v:
                    continue
                if G[j, k] != 0.0:
                    raw += (G[j, k] - Gv[j, k]) / G[j, k]
        scores[v] = max(raw / norm, 0.0)
    return scores


def abs_corr_double_loop(C: np.ndarray, subset: list[int]) -> dict[int, float]:
    out = {}
    for i in subset:
        total = 0.0
        for j in subset:
            if j != i:
                total += abs(C[i, j])
        out[i] = total
    return out


# ---------------------------------------------------------------------------
# backtest


def metrics_reference(returns) -> dict[str, float]:
    """Definition-level daily log-return statistics."""
    r = [float(x) for x in returns]
    n = len(r)
    mean = sum(r) / n
    var = sum((x - mean) ** 2 for x in r) / (n - 1)
    std = math.sqrt(var)
    ann_ret = 252 * mean
    ann_std = math.sqrt(252) * std
    m2 = sum((x - mean) ** 2 for x in r) / n
    m3 = sum((x - mean) ** 3 for x in r) / n
    value = []
    acc = 0.0
    for x in r:
        acc += x
        value.append(math.exp(acc))
    peak = -math.inf
    max_dd = 0.0
    for v in value:
        peak = max(peak, v)
        max_dd = min(max_dd, v / peak - 1.0)
    return {
        "annualized_return": ann_ret,
        "annualized_stddev": ann_std,
        "sharpe_ratio": ann_ret / ann_std,
        "daily_skewness": m3 / m2**1.5,
        "max_drawdown": max_dd,
    }


def replay_backtest(
    dates,
    assets,
    log_returns: np.ndarray,
    schedule: dict[int, dict[str, float]],
    fee_rate: float,
    first_day: int,
):
    """Spreadsheet-style replay: drifted weights tracked day by day.

    ``schedule`` maps a day index to the target weights set on that day.
    Returns (gross_log, net_log) lists covering days first_day..end.
    """
    col = {a: i for i, a in enumerate(assets)}
    weights: dict[str, float] = {}
    gross_out: list[float] = []
    net_out: list[float] = []
    for t in range(first_day, log_returns.shape[0]):
        cost = 0.0
        if t in schedule:
            target = schedule[t]
            turnover = 0.0
            for a in set(target) | set(weights):
                turnover += abs(target.get(a, 0.0) - weights.get(a, 0.0))
            cost = fee_rate * turnover
            weights = dict(target)
        simple = {}
        for a in weights:
            r = log_returns[t, col[a]]
            simple[a] = math.expm1(r) if not math.isnan(r) else 0.0
        gross = sum(weights[a] * simple[a] for a in weights)
        gross_out.append(math.log1p(gross))
        net_out.append(math.log1p(gross) + math.log1p(-cost))
        total = sum(weights[a] * (1.0 + simple[a]) for a in weights)
        if total > 0.0:
            weights = {a: weights[a] * (1.0 + simple[a]) / total for a in weights}
    return gross_out, net_out
