"""Tests for the synthetic MOTIF generator."""

import networkx as nx
import pytest

from smixup.graph.motif import (
    WHEEL_MIN_SIZE,
    MotifConfig,
    base_graph,
    contains_motif,
    gen_motif_dataset,
    motif_graph,
    to_networkx,
)
from smixup.graph.types import validate_graph

MOTIFS = ("cycle", "house", "crane")


class TestContainsMotif:
    @pytest.mark.parametrize("kind", MOTIFS)
    def test_motif_contains_itself(self, kind):
        assert contains_motif(motif_graph(kind), kind)

    def test_chord_hides_the_cycle(self):
        # the house outline is a 5-cycle, but the 0-1 edge is a chord across it
        assert not contains_motif(motif_graph("house"), "cycle")

    def test_roof_is_not_a_pendant(self):
        assert not contains_motif(motif_graph("house"), "crane")

    def test_graph_without_motif(self, rng):
        tree = base_graph("tree", 12, rng)
        for kind in MOTIFS:
            assert not contains_motif(tree, kind)

    def test_small_wheel_rim_is_a_cycle(self):
        assert contains_motif(nx.wheel_graph(6), "cycle")
        assert not contains_motif(nx.wheel_graph(WHEEL_MIN_SIZE), "cycle")

    def test_long_ladder_holds_a_crane(self):
        assert contains_motif(nx.ladder_graph(4), "crane")


class TestBases:
    def test_bases_carry_no_motif(self, rng):
        for kind in ("tree", "ladder", "wheel"):
            for size in range(4, 16):
                g = base_graph(kind, size, rng)
                assert not any(contains_motif(g, m) for m in MOTIFS), (kind, size)


class TestMotifDataset:
    def test_sizes_and_classes(self):
        ds = gen_motif_dataset(MotifConfig(count_per_class=10, seed=3))
        assert len(ds) == 30
        assert ds.num_classes == 3
        assert ds.feature_dim == 1
        assert sorted(ds.labels.tolist()) == [0] * 10 + [1] * 10 + [2] * 10

    def test_graphs_are_valid_and_connected(self):
        ds = gen_motif_dataset(MotifConfig(count_per_class=5, seed=1))
        for g in ds:
            validate_graph(g, raw=True)
            assert nx.is_connected(to_networkx(g))

    def test_each_graph_carries_only_its_class_motif(self):
        config = MotifConfig(count_per_class=30, seed=2)
        for g in gen_motif_dataset(config):
            nxg = to_networkx(g)
            own = config.motifs[g.class_index]
            assert contains_motif(nxg, own)
            assert not any(contains_motif(nxg, m) for m in config.motifs if m != own)

    def test_deterministic_per_seed(self):
        a = gen_motif_dataset(MotifConfig(count_per_class=4, seed=7))
        b = gen_motif_dataset(MotifConfig(count_per_class=4, seed=7))
        c = gen_motif_dataset(MotifConfig(count_per_class=4, seed=8))
        assert a.same_as(b)
        assert not a.same_as(c)

    def test_base_size_bounds_node_count(self):
        ds = gen_motif_dataset(MotifConfig(base_size=(6, 6), count_per_class=5, seed=0))
        largest_motif = max(motif_graph(k).number_of_nodes() for k in MOTIFS)
        assert all(g.n <= max(6, WHEEL_MIN_SIZE) + largest_motif for g in ds)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"motifs": ("triangle",)},
            {"bases": ("grid",)},
            {"base_size": (3, 8)},
            {"base_size": (9, 6)},
            {"count_per_class": 0},
        ],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValueError):
            MotifConfig(**kwargs)
