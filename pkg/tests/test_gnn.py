"""Tests for GCN/GIN layers, the classifier and checkpoints."""

import math

import numpy as np
import pytest
import torch

from smixup.gnn.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from smixup.gnn.layers import gcn_layer, gin_layer, readout, soft_cross_entropy
from smixup.gnn.model import (
    GnnClassifier,
    GnnConfig,
    batch_tensors,
    classifier_forward,
    load_classifier,
    predict_proba,
    save_classifier,
)
from smixup.graph.types import Graph, one_hot
from smixup.numerics.autodiff import ComputationRecord, finite_diff_check, record_module
from tests.helpers import permutation_matrix, random_graph

T = lambda x: torch.tensor(x, dtype=torch.float64)  # noqa: E731


def _weighted_symmetric(rng, n):
    a = np.triu(rng.random((n, n)), k=1)
    return torch.from_numpy(a + a.T)


# ---------------------------------------------------------------------------
# Layers
# ---------------------------------------------------------------------------


class TestGcnLayer:
    def test_single_node(self):
        out = gcn_layer(T([[2.0]]), T([[0.0]]), T([[1.5]]), T([0.0]))
        assert out.tolist() == [[3.0]]

    def test_two_nodes_one_edge(self):
        out = gcn_layer(T([[1.0], [0.0]]), T([[0.0, 1.0], [1.0, 0.0]]), T([[1.0]]), T([0.0]))
        assert torch.allclose(out, T([[0.5], [0.5]]), atol=1e-15)

    def test_rectifier_clamps(self):
        out = gcn_layer(T([[1.0]]), T([[0.0]]), T([[-1.0]]), T([0.0]))
        assert out.tolist() == [[0.0]]

    def test_asymmetric_adjacency_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            gcn_layer(T([[1.0], [1.0]]), T([[0.0, 1.0], [0.0, 0.0]]), T([[1.0]]))

    def test_permutation_equivariance(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 7))
            h, a = T(rng.normal(size=(n, 3))), _weighted_symmetric(rng, n)
            w, b = T(rng.normal(size=(3, 4))), T(rng.normal(size=4))
            p = torch.from_numpy(permutation_matrix(rng.permutation(n)))
            lhs = gcn_layer(p @ h, p @ a @ p.T, w, b)
            assert torch.allclose(lhs, p @ gcn_layer(h, a, w, b), atol=1e-9)


class TestGinLayer:
    _identity_mlp = (T([[1.0]]), T([0.0]), T([[1.0]]), T([0.0]))

    def test_isolated_node_is_plain_mlp(self):
        out = gin_layer(T([[2.0]]), T([[0.0]]), self._identity_mlp)
        assert out.tolist() == [[2.0]]

    def test_weighted_aggregation(self):
        out = gin_layer(T([[1.0], [1.0]]), T([[0.0, 0.5], [0.5, 0.0]]), self._identity_mlp)
        assert torch.allclose(out, T([[1.5], [1.5]]))

    def test_zero_adjacency_is_per_node(self, rng):
        h = T(rng.normal(size=(4, 2)))
        mlp = (T(rng.normal(size=(2, 3))), T(rng.normal(size=3)), T(rng.normal(size=(3, 3))), T(rng.normal(size=3)))
        full = gin_layer(h, torch.zeros(4, 4, dtype=torch.float64), mlp)
        for i in range(4):
            single = gin_layer(h[i : i + 1], torch.zeros(1, 1, dtype=torch.float64), mlp)
            assert torch.allclose(full[i], single[0])

    def test_permutation_equivariance(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 7))
            h, a = T(rng.normal(size=(n, 2))), _weighted_symmetric(rng, n)
            mlp = (T(rng.normal(size=(2, 3))), T(rng.normal(size=3)), T(rng.normal(size=(3, 3))), T(rng.normal(size=3)))
            p = torch.from_numpy(permutation_matrix(rng.permutation(n)))
            assert torch.allclose(gin_layer(p @ h, p @ a @ p.T, mlp), p @ gin_layer(h, a, mlp), atol=1e-9)


class TestReadoutAndLoss:
    def test_mean_and_sum(self):
        h = T([[1.0, 3.0], [3.0, 1.0]])
        assert readout(h, "mean").tolist() == [2.0, 2.0]
        assert readout(h, "sum").tolist() == [4.0, 4.0]

    def test_single_node_modes_agree(self):
        h = T([[0.3, -1.0]])
        assert torch.equal(readout(h, "mean"), readout(h, "sum"))

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            readout(torch.zeros(0, 2, dtype=torch.float64))

    def test_cross_entropy_values(self):
        assert float(soft_cross_entropy(T([0.0, 1.0]), T([0.0, 1.0]))) == 0.0
        assert math.isclose(float(soft_cross_entropy(T([0.5, 0.5]), T([0.3, 0.7]))), math.log(2), rel_tol=1e-12)

    def test_cross_entropy_clamps(self):
        assert math.isfinite(float(soft_cross_entropy(T([0.0, 1.0]), T([1.0, 0.0]))))

    def test_cross_entropy_linear_in_target(self):
        p, y1, y2, lam = T([0.2, 0.8]), T([1.0, 0.0]), T([0.0, 1.0]), 0.3
        mixed = soft_cross_entropy(p, lam * y1 + (1 - lam) * y2)
        split = lam * soft_cross_entropy(p, y1) + (1 - lam) * soft_cross_entropy(p, y2)
        assert math.isclose(float(mixed), float(split), rel_tol=1e-12)


# ---------------------------------------------------------------------------
# Classifier
# ---------------------------------------------------------------------------


def _model(backbone="gin", d=2, c=3, **kw):
    return GnnClassifier(GnnConfig(backbone=backbone, feature_dim=d, num_classes=c, **kw), seed=0)


class TestClassifier:
    def test_zero_head_gives_uniform(self, rng):
        model = _model(c=4)
        with torch.no_grad():
            model.head[-1].weight.zero_()
            model.head[-1].bias.zero_()
        p = classifier_forward(random_graph(rng, 5, label=0, num_classes=4), model)
        assert torch.allclose(p, torch.full((4,), 0.25, dtype=torch.float64), atol=1e-15)

    @pytest.mark.parametrize("backbone", ["gcn", "gin"])
    def test_probabilities_sum_to_one(self, rng, backbone):
        model = _model(backbone, readout="sum", head_layers=2)
        for _ in range(10):
            p = classifier_forward(random_graph(rng, int(rng.integers(1, 8)), num_classes=3), model)
            assert abs(float(p.sum()) - 1.0) < 1e-12

    def test_repeatable(self, rng):
        g = random_graph(rng, 6, num_classes=3)
        a, b = _model(), _model()
        assert torch.equal(classifier_forward(g, a), classifier_forward(g, a))
        assert torch.equal(classifier_forward(g, a), classifier_forward(g, b))

    def test_init_does_not_touch_global_rng(self):
        torch.manual_seed(123)
        expected = torch.rand(1)
        torch.manual_seed(123)
        _model()
        assert torch.equal(torch.rand(1), expected)

    @pytest.mark.parametrize("backbone", ["gcn", "gin"])
    def test_node_relabeling_invariance(self, rng, backbone):
        model = _model(backbone)
        for _ in range(10):
            g = random_graph(rng, int(rng.integers(2, 8)), num_classes=3)
            perm = rng.permutation(g.n)
            assert torch.allclose(classifier_forward(g, model), classifier_forward(g.permuted(perm), model), atol=1e-9)

    def test_batch_matches_single_graphs(self, rng):
        model = _model("gcn")
        graphs = [random_graph(rng, n, num_classes=3) for n in (1, 4, 2, 7)]
        batched = predict_proba(model, graphs, batch_size=3)
        for g, row in zip(graphs, batched):
            assert np.allclose(row, classifier_forward(g, model).detach().numpy(), atol=1e-12)

    def test_fully_connected_weighted_graph(self, rng):
        a = rng.random((5, 5))
        a = np.triu(a, 1) + np.triu(a, 1).T
        g = Graph(a, rng.normal(size=(5, 2)), np.array([0.2, 0.5, 0.3]))
        for backbone in ("gcn", "gin"):
            p = classifier_forward(g, _model(backbone))
            assert torch.isfinite(p).all()

    def test_feature_width_mismatch(self, rng):
        with pytest.raises(ValueError, match="width"):
            classifier_forward(random_graph(rng, 3, d=5, num_classes=3), _model())

    @pytest.mark.parametrize(
        "kwargs",
        [{"backbone": "gat"}, {"num_layers": 0}, {"hidden": 0}, {"readout": "max"}, {"feature_dim": 0}],
    )
    def test_invalid_config(self, kwargs):
        base = dict(backbone="gcn", feature_dim=2, num_classes=2)
        base.update(kwargs)
        with pytest.raises(ValueError):
            GnnConfig(**base)


# ---------------------------------------------------------------------------
# Gradient fidelity
# ---------------------------------------------------------------------------


class TestGradientFidelity:
    def test_gcn_layer(self, rng):
        for _ in range(100):
            n, p, q = (int(x) for x in rng.integers(1, [7, 5, 5]))
            a = _weighted_symmetric(rng, n)
            probe = T(rng.normal(size=(n, q)))
            record = ComputationRecord(
                {"h": T(rng.normal(size=(n, p))), "w": T(rng.normal(size=(p, q))), "b": T(rng.normal(size=q))},
                lambda prm: (gcn_layer(prm["h"], a, prm["w"], prm["b"]) * probe).sum(),
            )
            assert finite_diff_check(record) < 1e-4

    def test_gin_layer(self, rng):
        for _ in range(100):
            n, p, q = (int(x) for x in rng.integers(1, [7, 5, 5]))
            a = _weighted_symmetric(rng, n)
            probe = T(rng.normal(size=(n, q)))
            record = ComputationRecord(
                {
                    "h": T(rng.normal(size=(n, p))),
                    "w1": T(rng.normal(size=(p, q))),
                    "b1": T(rng.normal(size=q)),
                    "w2": T(rng.normal(size=(q, q))),
                    "b2": T(rng.normal(size=q)),
                },
                lambda prm: (
                    gin_layer(prm["h"], a, (prm["w1"], prm["b1"], prm["w2"], prm["b2"])) * probe
                ).sum(),
            )
            assert finite_diff_check(record) < 1e-4

    def test_full_classifier_loss(self, rng):
        for i in range(100):
            backbone = ("gcn", "gin")[i % 2]
            d, c = int(rng.integers(1, 5)), int(rng.integers(2, 5))
            model = GnnClassifier(
                GnnConfig(backbone=backbone, feature_dim=d, num_classes=c, num_layers=2, hidden=4,
                          readout=("mean", "sum")[i % 2]),
                seed=i,
            )
            g = random_graph(rng, int(rng.integers(1, 7)), d=d, num_classes=c)
            a, x, sizes = batch_tensors([g])
            y = torch.from_numpy(rng.dirichlet(np.ones(c)))
            record = record_module(model, lambda call, _: soft_cross_entropy(call(a, x, sizes)[0], y))
            assert finite_diff_check(record) < 1e-4


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


class TestCheckpoint:
    def test_classifier_round_trip_is_bitwise(self, tmp_path, rng):
        model = _model("gcn", head_layers=2)
        path = save_classifier(tmp_path / "c.pt", model)
        again = load_classifier(path)
        assert again.config == model.config
        for (k1, v1), (k2, v2) in zip(model.state_dict().items(), again.state_dict().items()):
            assert k1 == k2 and torch.equal(v1, v2)
        g = random_graph(rng, 4, num_classes=3)
        assert torch.equal(classifier_forward(g, model), classifier_forward(g, again))

    def test_kind_mismatch(self, tmp_path):
        save_checkpoint(tmp_path / "m.pt", "matcher", {}, {})
        with pytest.raises(CheckpointError, match="matcher"):
            load_classifier(tmp_path / "m.pt")

    def test_foreign_file(self, tmp_path):
        torch.save({"weights": torch.zeros(1)}, tmp_path / "x.pt")
        with pytest.raises(CheckpointError, match="not a"):
            load_checkpoint(tmp_path / "x.pt", "gnn")

    def test_wrong_version(self, tmp_path):
        torch.save({"format": "smixup-checkpoint", "version": 99, "kind": "gnn"}, tmp_path / "v.pt")
        with pytest.raises(CheckpointError, match="version"):
            load_checkpoint(tmp_path / "v.pt", "gnn")

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "absent.pt", "gnn")
