"""Tests for normalized GED, the mix-ratio bound and the random-pair sweep."""

import math

import numpy as np
import pytest

from smixup.ged.bound import (
    LAMBDA_GRID,
    BoundRow,
    bound_legs,
    normalized_ged,
    random_pair,
    ratio_bound,
    verify_bound,
)
from smixup.ged.distance import EditCostModel, GedUndefinedError
from smixup.graph.types import Graph, one_hot
from smixup.mixup.core import s_mixup_pair, transform_graph
from tests.helpers import random_graph

NORM = EditCostModel("norm")


def _graph(adjacency, features, label=0):
    return Graph(adjacency, features, one_hot(label, 2))


def _three_node_fixture():
    """g1 is 3 from g2' (one edge, one feature) and g2 is 1 from g2' (one feature)."""
    g1 = _graph([[0, 1, 0], [1, 0, 0], [0, 0, 0]], [[1.0], [1.0], [0.0]])
    g2_aligned = _graph(np.zeros((3, 3)), [[1.0], [0.0], [0.0]], label=1)
    g2 = _graph(np.zeros((3, 3)), [[0.0], [0.0], [0.0]], label=1)
    return g1, g2, g2_aligned


class TestNormalizedGed:
    def test_mix_equal_to_first_parent(self, rng):
        g1, g2 = random_graph(rng, 4), random_graph(rng, 4, label=1)
        assert normalized_ged(g1, g1, g2, "aligned-chain", g2_aligned=g2).epsilon == 1.0
        assert normalized_ged(g1, g1, g2, "exact").epsilon == 1.0

    def test_mix_equal_to_second_parent(self, rng):
        g1, g2 = random_graph(rng, 4), random_graph(rng, 4, label=1)
        assert normalized_ged(g2, g1, g2, "aligned-chain", g2_aligned=g2).epsilon == 0.0
        assert normalized_ged(g2, g1, g2, "exact").epsilon == 0.0

    def test_equidistant(self):
        g1 = _graph(np.zeros((1, 1)), [[0.0]])
        g2 = _graph(np.zeros((1, 1)), [[2.0]], label=1)
        mix = _graph(np.zeros((1, 1)), [[1.0]])
        result = normalized_ged(mix, g1, g2, "exact")
        assert result.epsilon == 0.5
        assert (result.d1, result.d2) == (1.0, 1.0)

    def test_undefined_when_all_equal(self, rng):
        g = random_graph(rng, 3)
        with pytest.raises(GedUndefinedError):
            normalized_ged(g, g, g, "aligned-chain", g2_aligned=g)

    def test_aligned_chain_needs_aligned_graph(self, rng):
        g = random_graph(rng, 3)
        with pytest.raises(ValueError, match="aligned second graph"):
            normalized_ged(g, g, random_graph(rng, 4), "aligned-chain")

    def test_aligned_chain_needs_equal_sizes(self, rng):
        g = random_graph(rng, 3)
        with pytest.raises(ValueError, match="equal sizes"):
            normalized_ged(random_graph(rng, 4), g, g, "aligned-chain", g2_aligned=g)

    def test_unknown_mode(self, rng):
        g = random_graph(rng, 2)
        with pytest.raises(ValueError, match="mode"):
            normalized_ged(g, g, g, "approximate")


class TestRatioBound:
    @pytest.mark.parametrize("mode", ["aligned-chain", "exact"])
    def test_worked_example(self, mode):
        g1, g2, g2_aligned = _three_node_fixture()
        assert bound_legs(g1, g2, g2_aligned, mode) == (3.0, 1.0)
        assert ratio_bound(g1, g2, g2_aligned, 0.5, mode) == 0.125

    def test_supplied_legs(self):
        g1, g2, g2_aligned = _three_node_fixture()
        assert ratio_bound(g1, g2, g2_aligned, 0.5, legs=(3.0, 1.0)) == 0.125

    def test_already_aligned_is_zero(self, rng):
        g1, g2 = random_graph(rng, 4), random_graph(rng, 4, label=1)
        assert ratio_bound(g1, g2, g2, 0.6) == 0.0

    def test_ratio_one_is_zero(self):
        g1, g2, g2_aligned = _three_node_fixture()
        assert ratio_bound(g1, g2, g2_aligned, 1.0) == 0.0

    def test_within_unit_interval_share(self, rng):
        for _ in range(30):
            g1, g2, m = random_pair(rng, max_nodes=4)
            lam = float(rng.uniform())
            bound = ratio_bound(g1, g2, transform_graph(g2, m), lam, cost=NORM)
            assert 0.0 <= bound <= 1.0 - lam + 1e-12

    def test_zero_denominator(self, rng):
        g = random_graph(rng, 3)
        with pytest.raises(GedUndefinedError):
            ratio_bound(g, g, g, 0.5)

    def test_aligned_graph_must_match_anchor(self, rng):
        with pytest.raises(ValueError, match="anchor"):
            ratio_bound(random_graph(rng, 3), random_graph(rng, 2), random_graph(rng, 2), 0.5)

    def test_ratio_out_of_range(self):
        g1, g2, g2_aligned = _three_node_fixture()
        with pytest.raises(ValueError, match="ratio"):
            ratio_bound(g1, g2, g2_aligned, -0.1)


class TestBoundOnMixes:
    def test_gap_matches_bound_under_norm_cost(self, rng):
        for _ in range(25):
            g1, g2, m = random_pair(rng, max_nodes=4)
            g2_aligned = transform_graph(g2, m)
            legs = bound_legs(g1, g2, g2_aligned, cost=NORM)
            for lam in LAMBDA_GRID:
                mix = s_mixup_pair(g1, g2, m, lam)
                eps = normalized_ged(mix, g1, g2, g2_aligned=g2_aligned, cost=NORM).epsilon
                bound = ratio_bound(g1, g2, g2_aligned, lam, legs=legs)
                assert abs(eps - lam) <= bound + 1e-9

    def test_aligned_inputs_keep_epsilon_at_ratio(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 6))
            g1, g2 = random_graph(rng, n), random_graph(rng, n, label=1)
            for lam in LAMBDA_GRID[:-1]:
                mix = s_mixup_pair(g1, g2, np.eye(n), lam)
                eps = normalized_ged(mix, g1, g2, g2_aligned=g2, cost=NORM).epsilon
                assert abs(eps - lam) <= 1e-9


class TestVerifyBound:
    def test_norm_cost_has_no_violations(self):
        sweep = verify_bound(pairs=40, cost=NORM, max_nodes=4, seed=1)
        assert len(sweep.rows) == (40 - sweep.skipped) * len(LAMBDA_GRID)
        assert sweep.violations == 0

    @pytest.mark.parametrize("cost", [NORM, EditCostModel("squared")])
    def test_epsilon_tracks_ratio_on_every_pair(self, cost):
        sweep = verify_bound(pairs=20, cost=cost, max_nodes=4, seed=6)
        assert sweep.skipped == 0
        assert len(sweep.rank_correlations) == 20
        assert all(rho > 0.9 for rho in sweep.rank_correlations)
        at_one = [r.epsilon for r in sweep.rows if r.lam == 1.0]
        assert len(at_one) == 20
        assert all(eps == 1.0 for eps in at_one)

    def test_squared_cost_is_reported(self):
        sweep = verify_bound(pairs=10, max_nodes=3, seed=2)
        assert {r.cost for r in sweep.rows} == {"squared"}
        assert all(0.0 <= r.epsilon <= 1.0 for r in sweep.rows)

    def test_exact_mode(self):
        sweep = verify_bound(pairs=5, mode="exact", cost=NORM, lambdas=(0.5, 1.0), max_nodes=3, seed=3)
        assert {r.mode for r in sweep.rows} == {"exact"}

    def test_seeded(self):
        a = verify_bound(pairs=5, cost=NORM, max_nodes=3, seed=4)
        b = verify_bound(pairs=5, cost=NORM, max_nodes=3, seed=4)
        assert a.rows == b.rows

    def test_violated_flag(self):
        row = BoundRow(pair=0, lam=0.5, epsilon=0.9, bound=0.1, gap=0.4, mode="exact", cost="norm")
        assert row.violated
        assert not BoundRow(0, 0.5, 0.6, 0.1, 0.1, "exact", "norm").violated
        assert math.isclose(row.gap, abs(row.epsilon - row.lam))
