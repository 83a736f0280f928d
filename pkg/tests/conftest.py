import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from topofolio.panels import PricePanel, ReturnPanel


def trading_dates(count, start=date(2015, 1, 5)):
    days = []
    d = start
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return tuple(days)


def make_return_panel(values, assets=None, start=date(2015, 1, 5)):
    values = np.asarray(values, dtype=float)
    if assets is None:
        assets = tuple(f"A{i}" for i in range(values.shape[1]))
    return ReturnPanel(trading_dates(values.shape[0], start), tuple(assets), values)


def make_price_panel(values, assets=None, start=date(2015, 1, 5)):
    values = np.asarray(values, dtype=float)
    if assets is None:
        assets = tuple(f"A{i}" for i in range(values.shape[1]))
    return PricePanel(trading_dates(values.shape[0], start), tuple(assets), values)


def duplicated_groups_panel(group_sizes, n_noise, n_days=250, seed=0, noise_scale=0.01):
    """Groups of identical return series plus independent noise assets."""
    rng = np.random.default_rng(seed)
    cols = []
    for size in group_sizes:
        base = rng.standard_normal(n_days) * noise_scale
        for _ in range(size):
            cols.append(base.copy())
    for _ in range(n_noise):
        cols.append(rng.standard_normal(n_days) * noise_scale)
    return make_return_panel(np.column_stack(cols))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
