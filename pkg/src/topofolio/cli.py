"""Command-line front end.

Subcommands: ``synth``, ``network``, ``select``, ``backtest``, ``grid``,
``report``. Configuration comes from a TOML file plus flag overrides;
defaults are a 126-day lookback, 84-day rebalance, 20 bps fees, 100
bootstrap repetitions, and a 2017-01-01 in/out-of-sample split. All
outputs are written atomically, and every command is deterministic for a
fixed config and seed. Exit codes: 0 success, 1 user or config error,
2 internal error.
"""

from __future__ import annotations

import json
import sys
from datetime import date as Date
from datetime import timedelta
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import serialize
from .backtest import (
    SELECTIONS,
    WEIGHTINGS,
    BacktestConfig,
    grid_search,
    run_backtest,
)
from .centrality import MEASURES, bootstrapped_centrality
from .exceptions import ConfigError, TopofolioError
from .filtering import SrIfnConfig, edge_occurrence, network_from_occurrence, sr_ifn
from .panels import ReturnPanel, constant_columns, correlation, load_prices, log_returns
from .portfolio import (
    equal_weights,
    inverse_centrality_weights,
    select_central,
    select_least_correlated,
    select_peripheral,
    select_random,
)
from .synthetic import SyntheticSpec, generate_prices

DEFAULT_SPLIT = Date(2017, 1, 1)
DEFAULT_CONF_LEVELS = tuple(round(0.05 * k, 2) for k in range(1, 20))  # 0.05 .. 0.95
DEFAULT_REBALANCE_GRID = (21, 42, 63, 84, 105, 126)
DEFAULT_LOOKBACK_GRID = (63, 126, 189, 252)

_MEASURE_OF_WEIGHTING = {
    "inv_degree": "degree",
    "inv_cbc": "cbc",
    "inv_abscorr": "abs_corr",
}


# ---------------------------------------------------------------------------
# config plumbing


def _load_toml(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError("config", f"file not found: {path}")
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"invalid TOML: {exc}") from None


def _get(section: dict, field: str, caster, default, section_name: str):
    if field not in section:
        return default
    try:
        return caster(section[field])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section_name}.{field}", str(exc)) from None


def _cast_date(value) -> Date:
    if isinstance(value, Date):
        return value
    return Date.fromisoformat(str(value))


def _cast_float_list(value) -> tuple[float, ...]:
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    return tuple(float(v) for v in value)


def _cast_int_list(value) -> tuple[int, ...]:
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    return tuple(int(v) for v in value)


def _cast_jitter(value):
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return float(value)


class RunConfig:
    """Validated union of the data, network, backtest, and output settings."""

    def __init__(self, raw: dict):
        data = raw.get("data", {})
        self.prices_path = _get(data, "prices", str, None, "data")
        self.start = _get(data, "start", _cast_date, None, "data")
        self.end = _get(data, "end", _cast_date, None, "data")
        self.split = _get(data, "split", _cast_date, DEFAULT_SPLIT, "data")

        net = raw.get("network", {})
        self.confidence_level = _get(net, "confidence_level", float, 0.7, "network")
        self.repetitions = _get(net, "repetitions", int, 100, "network")
        self.seed = _get(net, "seed", int, 0, "network")

        bt = raw.get("backtest", {})
        self.lookback_days = _get(bt, "lookback_days", int, 126, "backtest")
        self.rebalance_days = _get(bt, "rebalance_days", int, 84, "backtest")
        self.fee_bps = _get(bt, "fee_bps", float, 20.0, "backtest")
        self.strategy = _get(bt, "strategy", str, "PTP", "backtest")
        self.weighting = _get(bt, "weighting", str, "equal", "backtest")
        self.conf_levels = _get(
            bt, "conf_levels", _cast_float_list, None, "backtest"
        )
        self.start_offsets = _get(bt, "start_offsets", _cast_int_list, (0,), "backtest")
        self.sample = _get(bt, "sample", str, "all", "backtest")

        grid = raw.get("grid", {})
        self.rebalance_grid = _get(
            grid, "rebalance_grid", _cast_int_list, DEFAULT_REBALANCE_GRID, "grid"
        )
        self.lookback_grid = _get(
            grid, "lookback_grid", _cast_int_list, DEFAULT_LOOKBACK_GRID, "grid"
        )

        out = raw.get("output", {})
        self.out_dir = _get(out, "dir", str, "out", "output")

        self.synthetic = raw.get("synthetic", {})

        self._validate()

    def _validate(self):
        if self.strategy not in SELECTIONS:
            raise ConfigError("backtest.strategy", f"must be one of {SELECTIONS}")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError("backtest.weighting", f"must be one of {WEIGHTINGS}")
        if not 0.0 <= self.confidence_level <= 1.0:
            raise ConfigError("network.confidence_level", "must lie in [0, 1]")
        if self.repetitions < 1:
            raise ConfigError("network.repetitions", "must be a positive integer")
        if self.seed < 0:
            raise ConfigError("network.seed", "must be non-negative")
        if self.fee_bps < 0:
            raise ConfigError("backtest.fee_bps", "must be non-negative")
        if self.lookback_days < 2:
            raise ConfigError("backtest.lookback_days", "must be at least 2")
        if self.rebalance_days < 1:
            raise ConfigError("backtest.rebalance_days", "must be at least 1")
        if self.sample not in ("all", "in", "out"):
            raise ConfigError("backtest.sample", "must be all, in, or out")
        if self.conf_levels is not None and any(
            not 0.0 <= c <= 1.0 for c in self.conf_levels
        ):
            raise ConfigError("backtest.conf_levels", "entries must lie in [0, 1]")

    def sr_ifn_config(self, confidence_level: float | None = None) -> SrIfnConfig:
        return SrIfnConfig(
            confidence_level=(
                self.confidence_level if confidence_level is None else confidence_level
            ),
            repetitions=self.repetitions,
            base_seed=self.seed,
        )

    def sample_range(self, sample: str) -> tuple[Date | None, Date | None]:
        if sample == "in":
            return self.start, self.split - timedelta(days=1)
        if sample == "out":
            return self.split, self.end
        return self.start, self.end

    def synthetic_spec(self) -> SyntheticSpec:
        s = self.synthetic
        try:
            return SyntheticSpec(
                n_assets=_get(s, "n_assets", int, 20, "synthetic"),
                n_days=_get(s, "n_days", int, 500, "synthetic"),
                block_sizes=_get(s, "block_sizes", _cast_int_list, (), "synthetic"),
                block_correlations=_get(
                    s, "block_correlations", _cast_float_list, (), "synthetic"
                ),
                idio_vol=_get(s, "idio_vol", float, 0.01, "synthetic"),
                daily_drift=_get(s, "daily_drift", float, 0.0, "synthetic"),
                loading_jitter=_get(s, "loading_jitter", _cast_jitter, 0.0, "synthetic"),
                seed=_get(s, "seed", int, self.seed, "synthetic"),
                start_date=_get(s, "start_date", _cast_date, Date(2010, 1, 4), "synthetic"),
            )
        except ValueError as exc:
            raise ConfigError("synthetic", str(exc)) from None


def _build_config(
    config_path: str | None,
    seed: int | None,
    out: str | None,
    fee_bps: float | None,
    conf_lv: str | None,
    strategy: str | None,
    weighting: str | None,
) -> RunConfig:
    cfg = RunConfig(_load_toml(config_path))
    if seed is not None:
        cfg.seed = seed
        cfg._validate()
    if out is not None:
        cfg.out_dir = out
    if fee_bps is not None:
        cfg.fee_bps = fee_bps
    if conf_lv is not None:
        try:
            levels = _cast_float_list(conf_lv)
        except ValueError as exc:
            raise ConfigError("conf-lv", str(exc)) from None
        cfg.conf_levels = levels
        cfg.confidence_level = levels[0]
    if strategy is not None:
        cfg.strategy = strategy
    if weighting is not None:
        cfg.weighting = weighting
    cfg._validate()
    return cfg


def _load_returns(cfg: RunConfig, sample: str = "all") -> ReturnPanel:
    if cfg.prices_path is None:
        raise ConfigError("data.prices", "price file path is required")
    start, end = cfg.sample_range(sample)
    panel = load_prices(cfg.prices_path, start=start, end=end)
    return log_returns(panel)


def _complete_universe(returns: ReturnPanel) -> ReturnPanel:
    flat = constant_columns(returns.returns)
    usable = [i for i in returns.complete_asset_indices() if not flat[i]]
    if len(usable) < 2:
        raise TopofolioError("fewer than 2 assets have a complete usable history")
    return returns.take_assets(usable)


def _emit_error(exc: Exception, code: int) -> int:
    doc = {
        "error": type(exc).__name__,
        "message": str(exc),
        "field": getattr(exc, "field", None),
    }
    click.echo(json.dumps(doc, sort_keys=True))
    return code


def _guarded(fn) -> int:
    try:
        fn()
        return 0
    except (TopofolioError, FileNotFoundError, OSError, click.UsageError) as exc:
        return _emit_error(exc, 1)
    except Exception as exc:  # pragma: no cover - defensive
        return _emit_error(exc, 2)


_shared_options = [
    click.option("--config", "config_path", type=str, default=None, help="TOML config file."),
    click.option("--seed", type=int, default=None, help="Override the base RNG seed."),
    click.option("--out", type=str, default=None, help="Output directory."),
    click.option("--fee-bps", type=float, default=None, help="Fee in basis points."),
    click.option("--conf-lv", type=str, default=None, help="Confidence level(s), comma separated."),
    click.option(
        "--strategy", type=click.Choice(SELECTIONS), default=None, help="Selection rule."
    ),
    click.option(
        "--weighting", type=click.Choice(WEIGHTINGS), default=None, help="Weighting rule."
    ),
]


def _with_shared(fn):
    for opt in reversed(_shared_options):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Robust correlation-network portfolio toolkit."""


@main.command()
@_with_shared
@click.option("--prices-out", type=str, default=None, help="Price CSV path (default OUT/prices.csv).")
def synth(config_path, seed, out, fee_bps, conf_lv, strategy, weighting, prices_out):
    """Generate a synthetic factor-model price file."""

    def run():
        cfg = _build_config(config_path, seed, out, fee_bps, conf_lv, strategy, weighting)
        spec = cfg.synthetic_spec()
        panel = generate_prices(spec)
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        target = Path(prices_out) if prices_out else out_dir / "prices.csv"
        serialize.atomic_write_text(target, serialize.prices_csv(panel))
        click.echo(f"wrote {target}")

    sys.exit(_guarded(run))


@main.command()
@_with_shared
def network(config_path, seed, out, fee_bps, conf_lv, strategy, weighting):
    """Build the robust network and centrality files from a price history."""

    def run():
        cfg = _build_config(config_path, seed, out, fee_bps, conf_lv, strategy, weighting)
        returns = _complete_universe(_load_returns(cfg))
        sr_cfg = cfg.sr_ifn_config()
        occurrence = edge_occurrence(returns, sr_cfg)
        full = correlation(returns)
        net = network_from_occurrence(
            returns.assets, occurrence, full.values, sr_cfg.confidence_level
        )
        files = {
            "network.json": serialize.network_json(net, occurrence, sr_cfg),
            "edge_occurrence.csv": serialize.occurrence_csv(returns.assets, occurrence),
        }
        for measure in MEASURES:
            vector = bootstrapped_centrality(returns, sr_cfg, measure)
            files[f"centrality_{measure}.csv"] = serialize.centrality_csv(vector)
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            serialize.atomic_write_text(out_dir / name, text)
        click.echo(f"wrote {len(files)} files to {out_dir}")

    sys.exit(_guarded(run))


@main.command()
@_with_shared
def select(config_path, seed, out, fee_bps, conf_lv, strategy, weighting):
    """Select and weight a portfolio at the end of the price history."""

    def run():
        cfg = _build_config(config_path, seed, out, fee_bps, conf_lv, strategy, weighting)
        returns = _complete_universe(_load_returns(cfg))
        sr_cfg = cfg.sr_ifn_config()
        net = sr_ifn(returns, sr_cfg)
        if cfg.strategy == "PTP":
            chosen = select_peripheral(net)
        elif cfg.strategy == "CTP":
            chosen = select_central(net)
        elif cfg.strategy == "RBP":
            size = len(select_peripheral(net))
            chosen = select_random(net.assets, size, cfg.seed)
        elif cfg.strategy == "PBP":
            size = len(select_peripheral(net))
            chosen = select_least_correlated(correlation(returns), size)
        else:  # LongHold
            chosen = net.assets
        strategy_info = {
            "selection": cfg.strategy,
            "weighting": cfg.weighting,
            "confidence_level": sr_cfg.confidence_level,
            "repetitions": sr_cfg.repetitions,
            "base_seed": sr_cfg.base_seed,
        }
        if cfg.weighting == "equal":
            alloc = equal_weights(chosen, strategy_info)
        else:
            measure = _MEASURE_OF_WEIGHTING[cfg.weighting]
            scores = bootstrapped_centrality(returns, sr_cfg, measure)
            alloc = inverse_centrality_weights(chosen, scores, strategy_info)
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        serialize.atomic_write_text(out_dir / "allocation.csv", serialize.allocation_csv(alloc))
        serialize.atomic_write_text(
            out_dir / "allocation.json", serialize.allocation_strategy_json(alloc)
        )
        click.echo(f"selected {len(alloc.assets)} assets -> {out_dir}")

    sys.exit(_guarded(run))


def _combo_tag(strategy: str, weighting: str, conf: float, offset: int) -> str:
    return f"{strategy}_{weighting}_cl{int(round(conf * 100)):02d}_off{offset}"


@main.command()
@_with_shared
def backtest(config_path, seed, out, fee_bps, conf_lv, strategy, weighting):
    """Run walk-forward backtests for each confidence level and start offset."""

    def run():
        cfg = _build_config(config_path, seed, out, fee_bps, conf_lv, strategy, weighting)
        returns = _load_returns(cfg, cfg.sample)
        conf_levels = cfg.conf_levels if cfg.conf_levels is not None else DEFAULT_CONF_LEVELS
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        summary: dict[str, dict] = {}
        files: dict[str, str] = {}
        for conf in conf_levels:
            sharpes = []
            for offset in cfg.start_offsets:
                shifted = returns.rows(offset, returns.shape[0])
                bt_cfg = BacktestConfig(
                    lookback_days=cfg.lookback_days,
                    rebalance_days=cfg.rebalance_days,
                    fee_rate=cfg.fee_bps / 10_000.0,
                    selection=cfg.strategy,
                    weighting=cfg.weighting,
                    sr_ifn=cfg.sr_ifn_config(conf),
                )
                report = run_backtest(shifted, bt_cfg)
                tag = _combo_tag(cfg.strategy, cfg.weighting, conf, offset)
                files[f"bt_{tag}_metrics.json"] = serialize.metrics_json(
                    report, extra={"start_offset": offset}
                )
                files[f"bt_{tag}_returns.csv"] = serialize.daily_returns_csv(report)
                files[f"bt_{tag}_rebalances.csv"] = serialize.rebalance_log_csv(report)
                sharpes.append(report.metrics.sharpe_ratio)
            summary[f"cl{int(round(conf * 100)):02d}"] = {
                "confidence_level": conf,
                "sharpe_by_offset": sharpes,
                "sharpe_mean": float(np.mean(sharpes)),
                "sharpe_std": float(np.std(sharpes, ddof=1)) if len(sharpes) > 1 else 0.0,
            }
        files["bt_summary.json"] = (
            json.dumps(
                {
                    "strategy": cfg.strategy,
                    "weighting": cfg.weighting,
                    "fee_bps": cfg.fee_bps,
                    "combos": summary,
                },
                sort_keys=True,
                indent=2,
            )
            + "\n"
        )
        for name, text in files.items():
            serialize.atomic_write_text(out_dir / name, text)
        click.echo(f"wrote {len(files)} files to {out_dir}")

    sys.exit(_guarded(run))


@main.command()
@_with_shared
@click.option("--rebalance-grid", type=str, default=None, help="Comma list of rebalance periods.")
@click.option("--lookback-grid", type=str, default=None, help="Comma list of lookback windows.")
def grid(
    config_path, seed, out, fee_bps, conf_lv, strategy, weighting, rebalance_grid, lookback_grid
):
    """In-sample grid search over rebalance and lookback spans."""

    def run():
        cfg = _build_config(config_path, seed, out, fee_bps, conf_lv, strategy, weighting)
        rb_grid = _cast_int_list(rebalance_grid) if rebalance_grid else cfg.rebalance_grid
        lb_grid = _cast_int_list(lookback_grid) if lookback_grid else cfg.lookback_grid
        returns = _load_returns(cfg, "in" if cfg.split else "all")
        base = BacktestConfig(
            lookback_days=cfg.lookback_days,
            rebalance_days=cfg.rebalance_days,
            fee_rate=cfg.fee_bps / 10_000.0,
            selection=cfg.strategy,
            weighting=cfg.weighting,
            sr_ifn=cfg.sr_ifn_config(),
        )
        result = grid_search(returns, base, rb_grid, lb_grid)
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        serialize.atomic_write_text(out_dir / "grid_sharpe.csv", serialize.grid_csv(result))
        serialize.atomic_write_text(
            out_dir / "grid_references.json", serialize.grid_references_json(result)
        )
        click.echo(f"wrote grid files to {out_dir}")

    sys.exit(_guarded(run))


@main.command()
@_with_shared
def report(config_path, seed, out, fee_bps, conf_lv, strategy, weighting):
    """Aggregate bt_*_metrics.json files in the output directory into a CSV."""

    def run():
        cfg = _build_config(config_path, seed, out, fee_bps, conf_lv, strategy, weighting)
        out_dir = Path(cfg.out_dir)
        rows = []
        for path in sorted(out_dir.glob("bt_*_metrics.json")):
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            m = doc["metrics"]
            c = doc["config"]
            rows.append(
                ",".join(
                    [
                        path.stem.removeprefix("bt_").removesuffix("_metrics"),
                        c["selection"],
                        c["weighting"],
                        repr(c["confidence_level"]),
                        str(doc.get("start_offset", 0)),
                        repr(m["annualized_return"]),
                        repr(m["annualized_stddev"]),
                        repr(m["sharpe_ratio"]),
                        repr(m["daily_skewness"]),
                        repr(m["max_drawdown"]),
                        repr(m["mean_portfolio_size"]),
                    ]
                )
            )
        if not rows:
            raise TopofolioError(f"no bt_*_metrics.json files under {out_dir}")
        header = (
            "run,selection,weighting,confidence_level,start_offset,"
            "annualized_return,annualized_stddev,sharpe_ratio,"
            "daily_skewness,max_drawdown,mean_portfolio_size"
        )
        serialize.atomic_write_text(
            out_dir / "report_summary.csv", header + "\n" + "\n".join(rows) + "\n"
        )
        click.echo(f"wrote {out_dir / 'report_summary.csv'}")

    sys.exit(_guarded(run))


if __name__ == "__main__":
    main()
