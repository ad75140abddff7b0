"""Triplet training of the graph matching network.

Each step samples ``batch_size`` independent triplets (G1, G2 same class, G3
another class), embeds the pairs (G1, G2) and (G1, G3), sum-reads them out
and takes an Adam step on the mean triplet loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import torch

from smixup import ui
from smixup.graph.types import GraphDataset
from smixup.matcher.model import (
    GraphMatcher,
    MatcherConfig,
    graph_vectors,
    triplet_loss,
)
from smixup.gnn.model import batch_tensors


@dataclass(frozen=True)
class MatcherTrainConfig:
    margin: float = 1.0
    lr: float = 0.001
    epochs: int = 500
    batch_size: int = 256
    seed: int = 0

    def __post_init__(self):
        if not self.margin > 0:
            raise ValueError(f"margin must be > 0, got {self.margin}")
        if not self.lr > 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


class TripletSampler:
    """Uniform class, two distinct members of it, one graph of another class."""

    def __init__(self, ds: GraphDataset, rng: np.random.Generator):
        labels = ds.labels
        self.members = {c: np.flatnonzero(labels == c) for c in np.unique(labels).tolist()}
        self.anchors = [c for c, idx in self.members.items() if len(idx) >= 2]
        if len(self.members) < 2:
            raise ValueError(
                f"dataset {ds.name!r} has a single class; triplets need a negative class"
            )
        if not self.anchors:
            raise ValueError(f"dataset {ds.name!r} has no class with two graphs")
        self.rng = rng

    def sample(self) -> tuple[int, int, int]:
        c = self.anchors[int(self.rng.integers(len(self.anchors)))]
        i, j = self.rng.choice(self.members[c], size=2, replace=False).tolist()
        others = [k for k in self.members if k != c]
        neg = others[int(self.rng.integers(len(others)))]
        k = int(self.rng.choice(self.members[neg]))
        return i, j, k


def triplet_batch_loss(
    matcher: GraphMatcher,
    ds: GraphDataset,
    triplets: list[tuple[int, int, int]],
    margin: float,
) -> torch.Tensor:
    """Mean triplet loss over a batch of (anchor, positive, negative) indices."""
    anchors = [ds[i] for i, _, _ in triplets]
    partners = [ds[j] for _, j, _ in triplets] + [ds[k] for _, _, k in triplets]
    a1, x1, sizes1 = batch_tensors(anchors + anchors)
    a2, x2, sizes2 = batch_tensors(partners)
    h1, h2 = matcher(a1, x1, sizes1, a2, x2, sizes2)
    v1 = graph_vectors(h1, sizes1)
    v2 = graph_vectors(h2, sizes2)
    b = len(triplets)
    losses = triplet_loss(v1[:b], v2[:b], v1[b:], v2[b:], margin, matcher.config.metric)
    return losses.mean()


def train_matcher(
    train: GraphDataset,
    cfg: MatcherTrainConfig,
    model_config: Optional[MatcherConfig] = None,
    on_step: Optional[Callable[[int, float], None]] = None,
    verbose: bool = False,
) -> GraphMatcher:
    """Fit a matcher on ``train``; deterministic given ``cfg.seed``.

    ``on_step(step, loss)`` is called after every optimizer step.
    """
    rng = np.random.default_rng(cfg.seed)
    sampler = TripletSampler(train, rng)
    model_config = model_config or MatcherConfig(feature_dim=train.feature_dim)
    if model_config.feature_dim != train.feature_dim:
        raise ValueError(
            f"matcher width {model_config.feature_dim} does not match dataset width {train.feature_dim}"
        )
    matcher = GraphMatcher(model_config, seed=cfg.seed)
    optimizer = torch.optim.Adam(matcher.parameters(), lr=cfg.lr, betas=(0.9, 0.999))
    steps_per_epoch = math.ceil(len(train) / cfg.batch_size)
    step = 0
    for epoch in range(cfg.epochs):
        epoch_loss = 0.0
        for _ in range(steps_per_epoch):
            triplets = [sampler.sample() for _ in range(cfg.batch_size)]
            loss = triplet_batch_loss(matcher, train, triplets, cfg.margin)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            value = float(loss.detach())
            epoch_loss += value
            if on_step is not None:
                on_step(step, value)
            step += 1
        if verbose:
            ui.note("matcher", f"epoch {epoch + 1}/{cfg.epochs} loss {epoch_loss / steps_per_epoch:.4f}")
    matcher.eval()
    return matcher
