"""Shared fixtures: isolated storage root and small datasets."""

import numpy as np
import pytest

from smixup.graph.types import GraphDataset
from tests.helpers import path_graph


@pytest.fixture(autouse=True)
def _isolated_home(tmp_path, monkeypatch):
    monkeypatch.setenv("SMIXUP_HOME", str(tmp_path / "home"))
    monkeypatch.setenv("SMIXUP_QUIET", "1")
    monkeypatch.delenv("SMIXUP_TUDATASET_ROOT", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def separable_dataset() -> GraphDataset:
    """Two classes of small graphs told apart by a constant node feature."""
    rng = np.random.default_rng(1)
    graphs = []
    for i in range(40):
        label = i % 2
        n = int(rng.integers(3, 7))
        x = np.zeros((n, 2))
        x[:, label] = 1.0
        graphs.append(path_graph(n, label=label, features=x))
    return GraphDataset(tuple(graphs), num_classes=2, feature_dim=2, name="SEP")
