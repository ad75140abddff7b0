"""GCN / GIN graph classifiers over dense weighted adjacency.

Graphs in a batch are stacked block-diagonally; both layer types only mix rows
through the adjacency, so a block-diagonal batch computes exactly the
per-graph forward pass for every member.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from smixup.gnn.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from smixup.gnn.layers import VALID_READOUTS, gcn_layer, gin_layer, pooling_matrix
from smixup.graph.types import Graph

VALID_BACKBONES = ("gcn", "gin")


@dataclass(frozen=True)
class GnnConfig:
    backbone: str
    feature_dim: int
    num_classes: int
    num_layers: int = 4
    hidden: int = 32
    readout: str = "mean"
    head_layers: int = 1
    gin_eps: float = 0.0

    def __post_init__(self):
        if self.backbone not in VALID_BACKBONES:
            raise ValueError(f"backbone must be one of {VALID_BACKBONES}, got {self.backbone!r}")
        if self.readout not in VALID_READOUTS:
            raise ValueError(f"readout must be one of {VALID_READOUTS}, got {self.readout!r}")
        if self.num_layers < 1:
            raise ValueError(f"num_layers must be >= 1, got {self.num_layers}")
        if self.hidden < 1:
            raise ValueError(f"hidden must be >= 1, got {self.hidden}")
        if self.head_layers < 1:
            raise ValueError(f"head_layers must be >= 1, got {self.head_layers}")
        if self.feature_dim < 1:
            raise ValueError("classifier needs node features (feature_dim >= 1); featurize first")
        if self.num_classes < 2:
            raise ValueError(f"num_classes must be >= 2, got {self.num_classes}")

    def to_dict(self) -> dict:
        return asdict(self)


def batch_tensors(graphs: Sequence[Graph]) -> tuple[torch.Tensor, torch.Tensor, list[int]]:
    """Block-diagonal adjacency, stacked features and per-graph sizes."""
    if not graphs:
        raise ValueError("empty batch")
    a = torch.block_diag(*(torch.from_numpy(np.array(g.adjacency)) for g in graphs))
    x = torch.cat([torch.from_numpy(np.array(g.features)) for g in graphs], dim=0)
    return a, x, [g.n for g in graphs]


def label_tensor(graphs: Sequence[Graph]) -> torch.Tensor:
    return torch.from_numpy(np.stack([g.label for g in graphs]))


class GnnClassifier(nn.Module):
    """Message-passing stack, readout, affine head, softmax."""

    def __init__(self, config: GnnConfig, seed: int = 0):
        super().__init__()
        self.config = config
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            width = config.feature_dim
            self.layers = nn.ModuleList()
            for _ in range(config.num_layers):
                if config.backbone == "gcn":
                    self.layers.append(nn.Linear(width, config.hidden))
                else:
                    self.layers.append(
                        nn.ModuleList(
                            [nn.Linear(width, config.hidden), nn.Linear(config.hidden, config.hidden)]
                        )
                    )
                width = config.hidden
            self.head = nn.ModuleList(
                [nn.Linear(config.hidden, config.hidden) for _ in range(config.head_layers - 1)]
                + [nn.Linear(config.hidden, config.num_classes)]
            )
        self.double()

    def embed_nodes(self, a: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
        if x.shape[1] != self.config.feature_dim:
            raise ValueError(
                f"feature width {x.shape[1]} does not match classifier width {self.config.feature_dim}"
            )
        h = x
        for layer in self.layers:
            if self.config.backbone == "gcn":
                h = gcn_layer(h, a, layer.weight.T, layer.bias)
            else:
                first, second = layer
                mlp = (first.weight.T, first.bias, second.weight.T, second.bias)
                h = torch.relu(gin_layer(h, a, mlp, eps=self.config.gin_eps))
        return h

    def forward(self, a: torch.Tensor, x: torch.Tensor, sizes: Sequence[int]) -> torch.Tensor:
        """B x C class probabilities for a block-diagonal batch."""
        h = self.embed_nodes(a, x)
        z = pooling_matrix(list(sizes), self.config.readout, dtype=h.dtype) @ h
        for hidden in self.head[:-1]:
            z = torch.relu(hidden(z))
        return torch.softmax(self.head[-1](z), dim=-1)


def classifier_forward(g: Graph, model: GnnClassifier) -> torch.Tensor:
    """Length-C probability vector for a single graph."""
    a, x, sizes = batch_tensors([g])
    return model(a, x, sizes)[0]


def predict_proba(
    model: GnnClassifier,
    graphs: Sequence[Graph],
    batch_size: int = 256,
) -> np.ndarray:
    out = []
    with torch.no_grad():
        for start in range(0, len(graphs), batch_size):
            a, x, sizes = batch_tensors(graphs[start : start + batch_size])
            out.append(model(a, x, sizes).numpy())
    return np.concatenate(out, axis=0)


def save_classifier(path: Path, model: GnnClassifier) -> Path:
    return save_checkpoint(path, "gnn", model.config.to_dict(), model.state_dict())


def load_classifier(path: Path) -> GnnClassifier:
    config, state = load_checkpoint(path, "gnn")
    try:
        model = GnnClassifier(GnnConfig(**config))
        model.load_state_dict(state)
    except (TypeError, ValueError, RuntimeError) as e:
        raise CheckpointError(f"{path}: checkpoint does not match a classifier ({e})") from e
    return model
