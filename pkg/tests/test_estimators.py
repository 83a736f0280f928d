import numpy as np
import pytest
from sklearn.base import clone

from conftest import duplicated_groups_panel, make_return_panel
from topofolio.estimators import SRIFN, TMFG
from topofolio.filtering import SrIfnConfig, sr_ifn, tmfg
from topofolio.panels import correlation


class TestTMFGEstimator:
    def test_fit_matches_functional_path(self, rng):
        X = rng.normal(0, 0.01, size=(60, 7))
        est = TMFG().fit(X)
        panel = make_return_panel(X)
        net = tmfg(correlation(panel))
        assert np.array_equal(np.asarray(est.adjacency_), np.asarray(net.adjacency))
        assert est.n_features_in_ == 7
        assert est.network_.edge_count == 3 * 7 - 6

    def test_fit_from_correlation(self, rng):
        panel = make_return_panel(rng.normal(size=(40, 6)))
        corr = correlation(panel)
        est = TMFG().fit_from_correlation(corr)
        assert est.assets_ == corr.assets

    def test_accepts_return_panel(self, rng):
        panel = make_return_panel(rng.normal(size=(30, 5)))
        est = TMFG().fit(panel)
        assert est.assets_ == panel.assets

    def test_get_params_roundtrip(self):
        est = TMFG()
        assert est.get_params() == {}
        clone(est)


class TestSRIFNEstimator:
    def test_fit_matches_functional_path(self, rng):
        X = rng.normal(0, 0.01, size=(50, 6))
        est = SRIFN(confidence_level=0.5, repetitions=8, base_seed=4).fit(X)
        panel = make_return_panel(X)
        net = sr_ifn(panel, SrIfnConfig(0.5, 8, 4))
        assert np.array_equal(np.asarray(est.adjacency_), np.asarray(net.adjacency))
        assert np.array_equal(est.similarity_, net.similarity)
        rebuilt = (est.edge_occurrence_ > 0.5).astype(int)
        np.fill_diagonal(rebuilt, 0)
        assert np.array_equal(rebuilt, np.asarray(net.adjacency).astype(int))

    def test_peripheral_assets(self):
        panel = duplicated_groups_panel((3, 3), n_noise=4, n_days=150, seed=3)
        est = SRIFN(confidence_level=0.9, repetitions=20, base_seed=7).fit(panel)
        peripheral = est.peripheral_assets()
        degrees = est.network_.degrees
        assert peripheral == tuple(
            a for a, d in zip(est.assets_, degrees) if d == 0
        )
        # Duplicated groups can never be isolated; some noise should be.
        assert set(peripheral) <= set(panel.assets[6:])
        assert len(peripheral) >= 1
        assert est.peripheral_mask_.sum() == len(peripheral)

    def test_sklearn_param_interface(self):
        est = SRIFN(confidence_level=0.8, repetitions=12, base_seed=9)
        params = est.get_params()
        assert params == {"confidence_level": 0.8, "repetitions": 12, "base_seed": 9}
        cloned = clone(est).set_params(repetitions=5)
        assert cloned.get_params()["repetitions"] == 5

    def test_unfitted_access_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            SRIFN().peripheral_assets()

    def test_rejects_tiny_input(self):
        with pytest.raises(ValueError):
            SRIFN().fit(np.zeros((1, 5)))
