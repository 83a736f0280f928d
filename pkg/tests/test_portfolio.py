from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import duplicated_groups_panel, make_return_panel
from topofolio.centrality import CentralityVector
from topofolio.exceptions import (
    CountExceedsUniverseError,
    EmptySelectionError,
    MissingCentralityError,
)
from topofolio.filtering import FilteredNetwork, SrIfnConfig, edge_occurrence, sr_ifn
from topofolio.panels import CorrelationMatrix, correlation
from topofolio.portfolio import (
    PortfolioAllocation,
    equal_weights,
    inverse_centrality_weights,
    select_central,
    select_least_correlated,
    select_peripheral,
    select_random,
)


def empty_network(n):
    names = tuple(f"A{i}" for i in range(n))
    z = np.zeros((n, n))
    return FilteredNetwork(names, z.astype(int), z)


class TestPeripheralCentral:
    def test_all_zero_similarity_selects_everything(self):
        net = empty_network(5)
        assert select_peripheral(net) == net.assets
        with pytest.raises(EmptySelectionError):
            select_central(net)

    def test_connected_tmfg_has_no_peripherals(self, rng):
        panel = make_return_panel(rng.normal(size=(50, 8)))
        net = sr_ifn(panel, SrIfnConfig(confidence_level=0.0, repetitions=1, base_seed=0))
        assert net.edge_count == 3 * 8 - 6
        with pytest.raises(EmptySelectionError):
            select_peripheral(net)
        assert select_central(net) == net.assets

    def test_partition_property(self, rng):
        panel = make_return_panel(rng.normal(size=(60, 10)))
        net = sr_ifn(panel, SrIfnConfig(confidence_level=0.6, repetitions=15, base_seed=3))
        peripheral = set(select_peripheral(net))
        central = set(select_central(net))
        assert peripheral | central == set(net.assets)
        assert peripheral & central == set()

    def test_block_dataset_recovers_noise_assets(self):
        panel = duplicated_groups_panel((4, 4, 4), n_noise=5, n_days=200, seed=6)
        config = SrIfnConfig(confidence_level=0.8, repetitions=40, base_seed=1)
        net = sr_ifn(panel, config)
        occ = edge_occurrence(panel, config)
        # Independent verification from the occurrence counts themselves.
        iso = [
            net.assets[i]
            for i in range(len(net.assets))
            if np.all(np.delete(occ[i], i) <= 0.8)
        ]
        peripheral = select_peripheral(net)
        assert set(peripheral) == set(iso)
        noise_assets = set(net.assets[12:])
        assert noise_assets <= set(peripheral)
        central = select_central(net)
        assert set(central) == set(net.assets[:12]) - set(peripheral)


class TestSelectRandom:
    def test_full_universe(self):
        assert select_random(("A", "B", "C"), 3, seed=0) == ("A", "B", "C")

    def test_empty_count(self):
        assert select_random(("A", "B"), 0, seed=0) == ()

    def test_count_exceeds(self):
        with pytest.raises(CountExceedsUniverseError):
            select_random(("A",), 2, seed=0)

    def test_deterministic(self):
        a = select_random(tuple("ABCDEFGH"), 3, seed=42)
        b = select_random(tuple("ABCDEFGH"), 3, seed=42)
        assert a == b

    def test_pair_frequencies_uniform(self):
        universe = tuple("ABCDE")
        counts = {pair: 0 for pair in combinations(universe, 2)}
        trials = 10_000
        for seed in range(trials):
            picked = select_random(universe, 2, seed=seed)
            counts[tuple(sorted(picked))] += 1
        sigma = (0.1 * 0.9 / trials) ** 0.5
        for pair, hits in counts.items():
            assert abs(hits / trials - 0.1) < 3 * sigma, pair


class TestSelectLeastCorrelated:
    def test_identity_ties_break_by_index(self):
        corr = CorrelationMatrix(tuple("ABCDE"), np.eye(5))
        assert select_least_correlated(corr, 3) == ("A", "B", "C")

    def test_isolated_asset_wins(self):
        values = np.array(
            [
                [1.0, 0.9, 0.9, 0.0],
                [0.9, 1.0, 0.9, 0.0],
                [0.9, 0.9, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )
        corr = CorrelationMatrix(tuple("ABCD"), values)
        assert select_least_correlated(corr, 1) == ("D",)

    def test_matches_sort_oracle(self, rng):
        X = rng.normal(size=(60, 8))
        corr = correlation(make_return_panel(X))
        got = select_least_correlated(corr, 4)
        totals = {
            corr.assets[i]: sum(
                abs(corr.values[i, j]) for j in range(8) if j != i
            )
            for i in range(8)
        }
        expected = tuple(
            sorted(sorted(totals, key=lambda a: (totals[a], corr.assets.index(a)))[:4],
                   key=corr.assets.index)
        )
        assert got == expected

    def test_full_count_returns_universe(self, rng):
        X = rng.normal(size=(40, 6))
        corr = correlation(make_return_panel(X))
        assert select_least_correlated(corr, 6) == corr.assets


class TestWeights:
    def test_equal_weights_quarters(self):
        alloc = equal_weights(("A", "B", "C", "D"))
        assert np.all(alloc.weights == 0.25)

    def test_single_asset(self):
        alloc = equal_weights(("A",))
        assert alloc.weights[0] == 1.0

    def test_sum_to_one(self):
        for k in (3, 7, 11, 101):
            alloc = equal_weights(tuple(f"A{i}" for i in range(k)))
            assert abs(float(alloc.weights.sum()) - 1.0) < 1e-15

    def test_equal_centralities_give_equal_weights(self):
        cv = CentralityVector(("A", "B", "C"), "degree", np.array([0.4, 0.4, 0.4]))
        alloc = inverse_centrality_weights(("A", "B", "C"), cv)
        assert np.allclose(alloc.weights, 1 / 3, atol=1e-15)

    def test_one_three_ratio(self):
        cv = CentralityVector(("A", "B"), "degree", np.array([1.0, 3.0]))
        alloc = inverse_centrality_weights(("A", "B"), cv)
        assert np.allclose(alloc.weights, [0.75, 0.25], atol=1e-15)

    def test_zero_centrality_dominates(self):
        cv = CentralityVector(("A", "B"), "cbc", np.array([2.0, 0.0]))
        alloc = inverse_centrality_weights(("A", "B"), cv)
        assert alloc.weights[1] > 0.999999
        assert abs(float(alloc.weights.sum()) - 1.0) < 1e-12

    def test_missing_centrality(self):
        cv = CentralityVector(("A",), "degree", np.array([0.5]))
        with pytest.raises(MissingCentralityError):
            inverse_centrality_weights(("A", "B"), cv)

    def test_empty_selection(self):
        cv = CentralityVector(("A",), "degree", np.array([0.5]))
        with pytest.raises(EmptySelectionError):
            inverse_centrality_weights((), cv)
        with pytest.raises(EmptySelectionError):
            equal_weights(())

    @settings(max_examples=40, deadline=None)
    @given(scale=st.floats(min_value=1e-3, max_value=1e6))
    def test_scale_invariance(self, scale):
        base = np.array([0.2, 0.5, 1.7, 0.9])
        names = ("A", "B", "C", "D")
        lo = inverse_centrality_weights(names, CentralityVector(names, "cbc", base))
        hi = inverse_centrality_weights(
            names, CentralityVector(names, "cbc", base * scale)
        )
        assert np.max(np.abs(lo.weights - hi.weights)) < 1e-12

    def test_anti_monotone(self, rng):
        scores = rng.uniform(0.05, 2.0, size=6)
        names = tuple(f"A{i}" for i in range(6))
        alloc = inverse_centrality_weights(names, CentralityVector(names, "cbc", scores))
        for i in range(6):
            for j in range(6):
                if scores[i] < scores[j]:
                    assert alloc.weights[i] > alloc.weights[j]


class TestAllocationType:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            PortfolioAllocation(("A", "B"), np.array([0.6, 0.6]))

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError):
            PortfolioAllocation(("A", "B"), np.array([1.0, 0.0]))

    def test_duplicate_assets_rejected(self):
        with pytest.raises(ValueError):
            PortfolioAllocation(("A", "A"), np.array([0.5, 0.5]))

    def test_mapping_view(self):
        alloc = PortfolioAllocation(("A", "B"), np.array([0.25, 0.75]))
        assert alloc.as_mapping() == {"A": 0.25, "B": 0.75}
