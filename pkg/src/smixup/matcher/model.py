"""Graph matching network: within-graph messages plus cross-graph attention.

Each layer updates both graphs of a pair::

    m   = A H W_msg                          (within-graph, sum aggregation)
    mu  = softmax_j(sim(h_i, h'_j)) (h'_j - h_i) summed over j
    H  <- relu([H, m, mu] W_upd + b)

with the same parameters for both sides, so the pair is treated
symmetrically. Pairs are batched block-diagonally and the cross-graph
attention is masked to the owning pair.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from smixup.gnn.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from smixup.gnn.layers import pooling_matrix
from smixup.gnn.model import batch_tensors
from smixup.graph.types import Graph
from smixup.numerics.kernels import (
    VALID_METRICS,
    VALID_NORMALIZERS,
    as_tensor,
    normalize_scores,
    pairwise_similarity,
    vector_similarity,
)


@dataclass(frozen=True)
class MatcherConfig:
    feature_dim: int
    num_layers: int = 5
    hidden: int = 256
    metric: str = "cosine"
    normalizer: str = "softmax"

    def __post_init__(self):
        if self.num_layers < 1:
            raise ValueError(f"matcher needs at least one layer, got {self.num_layers}")
        if self.hidden < 1:
            raise ValueError(f"hidden must be >= 1, got {self.hidden}")
        if self.feature_dim < 1:
            raise ValueError("matcher needs node features (feature_dim >= 1); featurize first")
        if self.metric not in VALID_METRICS:
            raise ValueError(f"metric must be one of {VALID_METRICS}, got {self.metric!r}")
        if self.normalizer not in VALID_NORMALIZERS:
            raise ValueError(f"normalizer must be one of {VALID_NORMALIZERS}, got {self.normalizer!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def _attend(
    h1: torch.Tensor,
    h2: torch.Tensor,
    metric: str,
    mask: torch.Tensor | None = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Row-softmax attention of h1 over h2; returns (n1 x n2 probs, messages)."""
    scores = pairwise_similarity(h1, h2, metric)
    if mask is not None:
        scores = scores.masked_fill(~mask, float("-inf"))
    probs = torch.softmax(scores, dim=1)
    return probs, probs @ h2 - h1


def cross_graph_attention(
    h1: torch.Tensor,
    h2: torch.Tensor,
    metric: str,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Attention of every node of graph 1 over graph 2.

    Returns ``(weights, messages)``: ``weights[j, i]`` is the share of node j
    of graph 2 in node i's message (each column sums to 1), and
    ``messages[i] = sum_j weights[j, i] * (h2[j] - h1[i])``.
    """
    h1, h2 = as_tensor(h1), as_tensor(h2)
    if h1.shape[1] != h2.shape[1]:
        raise ValueError(f"embedding widths differ: {h1.shape[1]} vs {h2.shape[1]}")
    probs, messages = _attend(h1, h2, metric)
    return probs.T, messages


def _pair_mask(sizes1: Sequence[int], sizes2: Sequence[int]) -> torch.Tensor:
    owner1 = torch.repeat_interleave(torch.arange(len(sizes1)), torch.tensor(list(sizes1)))
    owner2 = torch.repeat_interleave(torch.arange(len(sizes2)), torch.tensor(list(sizes2)))
    return owner1[:, None] == owner2[None, :]


class GraphMatcher(nn.Module):
    def __init__(self, config: MatcherConfig, seed: int = 0):
        super().__init__()
        self.config = config
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            self.message = nn.ModuleList()
            self.update = nn.ModuleList()
            width = config.feature_dim
            for _ in range(config.num_layers):
                self.message.append(nn.Linear(width, config.hidden, bias=False))
                self.update.append(nn.Linear(2 * width + config.hidden, config.hidden))
                width = config.hidden
        self.double()

    def forward(
        self,
        a1: torch.Tensor,
        x1: torch.Tensor,
        sizes1: Sequence[int],
        a2: torch.Tensor,
        x2: torch.Tensor,
        sizes2: Sequence[int],
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Node embeddings for a batch of pairs (graph i of side 1 with graph i of side 2)."""
        if len(sizes1) != len(sizes2):
            raise ValueError(f"{len(sizes1)} left graphs but {len(sizes2)} right graphs")
        for x in (x1, x2):
            if x.shape[1] != self.config.feature_dim:
                raise ValueError(
                    f"feature width {x.shape[1]} does not match matcher width {self.config.feature_dim}"
                )
        mask = _pair_mask(sizes1, sizes2)
        h1, h2 = x1, x2
        for message, update in zip(self.message, self.update):
            m1 = a1 @ message(h1)
            m2 = a2 @ message(h2)
            _, mu1 = _attend(h1, h2, self.config.metric, mask)
            _, mu2 = _attend(h2, h1, self.config.metric, mask.T)
            h1, h2 = (
                torch.relu(update(torch.cat([h1, m1, mu1], dim=1))),
                torch.relu(update(torch.cat([h2, m2, mu2], dim=1))),
            )
        return h1, h2


def _split(h: torch.Tensor, sizes: Sequence[int]) -> list[torch.Tensor]:
    return list(torch.split(h, list(sizes), dim=0))


def embed_pairs(
    pairs: Sequence[tuple[Graph, Graph]],
    matcher: GraphMatcher,
) -> list[tuple[torch.Tensor, torch.Tensor]]:
    if not pairs:
        return []
    a1, x1, sizes1 = batch_tensors([p[0] for p in pairs])
    a2, x2, sizes2 = batch_tensors([p[1] for p in pairs])
    h1, h2 = matcher(a1, x1, sizes1, a2, x2, sizes2)
    return list(zip(_split(h1, sizes1), _split(h2, sizes2)))


def embed_pair(g1: Graph, g2: Graph, matcher: GraphMatcher) -> tuple[torch.Tensor, torch.Tensor]:
    return embed_pairs([(g1, g2)], matcher)[0]


def graph_vectors(h: torch.Tensor, sizes: Sequence[int]) -> torch.Tensor:
    """Sum readout per graph of a stacked embedding matrix."""
    return pooling_matrix(list(sizes), "sum", dtype=h.dtype) @ h


def assignment_matrix(
    h1: torch.Tensor,
    h2: torch.Tensor,
    metric: str,
    normalizer: str = "softmax",
) -> torch.Tensor:
    """n1 x n2 soft assignment; column j is node j of graph 2 spread over graph 1."""
    return normalize_scores(pairwise_similarity(h1, h2, metric), normalizer)


def learned_assignment(g1: Graph, g2: Graph, matcher: GraphMatcher) -> np.ndarray:
    with torch.no_grad():
        h1, h2 = embed_pair(g1, g2, matcher)
        m = assignment_matrix(h1, h2, matcher.config.metric, matcher.config.normalizer)
    return m.numpy()


def triplet_loss(
    h_g1: torch.Tensor,
    h_g2: torch.Tensor,
    h_g1_alt: torch.Tensor,
    h_g3: torch.Tensor,
    margin: float = 1.0,
    metric: str = "cosine",
) -> torch.Tensor:
    """max(0, sim(h_g1_alt, h_g3) - sim(h_g1, h_g2) + margin), row-wise for stacks."""
    if not margin > 0:
        raise ValueError(f"margin must be > 0, got {margin}")
    positive = vector_similarity(h_g1, h_g2, metric)
    negative = vector_similarity(h_g1_alt, h_g3, metric)
    return torch.relu(negative - positive + margin)


def save_matcher(path: Path, matcher: GraphMatcher) -> Path:
    return save_checkpoint(path, "matcher", matcher.config.to_dict(), matcher.state_dict())


def load_matcher(path: Path) -> GraphMatcher:
    config, state = load_checkpoint(path, "matcher")
    try:
        matcher = GraphMatcher(MatcherConfig(**config))
        matcher.load_state_dict(state)
    except (TypeError, ValueError, RuntimeError) as e:
        raise CheckpointError(f"{path}: checkpoint does not match a matcher ({e})") from e
    return matcher
