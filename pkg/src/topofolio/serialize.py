"""File emission: network JSON, CSV reports, and atomic writes.

All writers produce byte-stable output for identical inputs: edge lists
are sorted, JSON keys are sorted, and floats are rendered with ``repr``
so they round-trip exactly.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict
from typing import Mapping

import numpy as np

from .backtest import BacktestReport, GridSearchResult, MetricSet
from .centrality import CentralityVector
from .filtering import FilteredNetwork, SrIfnConfig
from .panels import PricePanel
from .portfolio import PortfolioAllocation

__all__ = [
    "atomic_write_text",
    "network_json",
    "occurrence_csv",
    "centrality_csv",
    "allocation_csv",
    "allocation_strategy_json",
    "metrics_json",
    "daily_returns_csv",
    "rebalance_log_csv",
    "grid_csv",
    "grid_references_json",
    "prices_csv",
]


def _num(x) -> str:
    return repr(float(x))


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file and rename, so readers never see partial bytes."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def network_json(
    net: FilteredNetwork,
    occurrence: np.ndarray | None = None,
    config: SrIfnConfig | None = None,
) -> str:
    """Network document: asset list, sorted edge list, config echo."""
    edges = []
    for i, j in net.edges():
        entry = {
            "i": i,
            "j": j,
            "similarity": float(net.similarity[i, j]),
            "occurrence": float(occurrence[i, j]) if occurrence is not None else None,
        }
        edges.append(entry)
    doc = {
        "assets": list(net.assets),
        "edges": edges,
        "config": asdict(config) if config is not None else None,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def occurrence_csv(assets, occurrence: np.ndarray) -> str:
    """Edge occurrence probabilities, one row per (i, j) pair with i < j."""
    lines = ["i,j,asset_i,asset_j,occurrence"]
    n = len(assets)
    for i in range(n):
        for j in range(i + 1, n):
            lines.append(f"{i},{j},{assets[i]},{assets[j]},{_num(occurrence[i, j])}")
    return "\n".join(lines) + "\n"


def centrality_csv(vector: CentralityVector) -> str:
    lines = ["asset,measure,score"]
    for asset, score in zip(vector.assets, vector.scores):
        lines.append(f"{asset},{vector.measure},{_num(score)}")
    return "\n".join(lines) + "\n"


def allocation_csv(alloc: PortfolioAllocation) -> str:
    lines = ["asset,weight"]
    for asset, w in zip(alloc.assets, alloc.weights):
        lines.append(f"{asset},{_num(w)}")
    return "\n".join(lines) + "\n"


def allocation_strategy_json(alloc: PortfolioAllocation) -> str:
    doc = {"strategy": alloc.strategy, "n_assets": len(alloc.assets)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _metric_dict(metrics: MetricSet) -> dict:
    # NaN (degenerate series, unknown sizes) is not valid JSON; use null.
    return {
        k: (None if isinstance(v, float) and np.isnan(v) else v)
        for k, v in asdict(metrics).items()
    }


def metrics_json(report: BacktestReport, extra: Mapping | None = None) -> str:
    doc = {
        "metrics": _metric_dict(report.metrics),
        "n_days": len(report.dates),
        "n_rebalances": len(report.rebalances),
        "total_cost": sum(r.cost for r in report.rebalances),
        "config": {
            "lookback_days": report.config.lookback_days,
            "rebalance_days": report.config.rebalance_days,
            "fee_rate": report.config.fee_rate,
            "selection": report.config.selection,
            "weighting": report.config.weighting,
            "confidence_level": report.config.sr_ifn.confidence_level,
            "repetitions": report.config.sr_ifn.repetitions,
            "base_seed": report.config.sr_ifn.base_seed,
        },
        "annualization": "log-based: 252 * mean(daily log return)",
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def daily_returns_csv(report: BacktestReport) -> str:
    lines = ["date,gross_log_return,net_log_return"]
    for day, g, n in zip(report.dates, report.gross_log, report.net_log):
        lines.append(f"{day.isoformat()},{_num(g)},{_num(n)}")
    return "\n".join(lines) + "\n"


def rebalance_log_csv(report: BacktestReport) -> str:
    lines = ["date,n_assets,cost,edge_count,fallback,assets,weights"]
    for rec in report.rebalances:
        assets = ";".join(rec.assets)
        weights = ";".join(_num(w) for w in rec.weights)
        edge = "" if rec.edge_count is None else str(rec.edge_count)
        lines.append(
            f"{rec.date.isoformat()},{len(rec.assets)},{_num(rec.cost)},"
            f"{edge},{int(rec.fallback)},{assets},{weights}"
        )
    return "\n".join(lines) + "\n"


def grid_csv(result: GridSearchResult) -> str:
    """Sharpe heatmap: rows are rebalance periods, columns lookbacks."""
    header = "rebalance_days\\lookback_days," + ",".join(
        str(lb) for lb in result.lookback_grid
    )
    lines = [header]
    for rb in result.rebalance_grid:
        cells = []
        for lb in result.lookback_grid:
            m = result.cells.get((rb, lb))
            cells.append(_num(m.sharpe_ratio) if m is not None else "")
        lines.append(f"{rb}," + ",".join(cells))
    return "\n".join(lines) + "\n"


def grid_references_json(result: GridSearchResult) -> str:
    doc = {
        "long_hold": _metric_dict(result.long_hold) if result.long_hold else None,
        "equal_weight_mean_sharpe": result.equal_weight_mean_sharpe,
        "failures": {f"{rb},{lb}": msg for (rb, lb), msg in sorted(result.failures.items())},
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def prices_csv(panel: PricePanel) -> str:
    lines = ["date," + ",".join(panel.assets)]
    for day, row in zip(panel.dates, panel.prices):
        cells = ["" if np.isnan(p) else _num(p) for p in row]
        lines.append(day.isoformat() + "," + ",".join(cells))
    return "\n".join(lines) + "\n"
