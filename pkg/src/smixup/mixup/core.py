"""Graph mixup under a node assignment.

With M an n1 x n2 assignment from the nodes of G2 onto the nodes of G1::

    A' = lam A1 + (1 - lam) M A2 M^T
    X' = lam X1 + (1 - lam) M X2
    y' = lam y1 + (1 - lam) y2

``M A2 M^T`` is symmetrized, clamped into [0, 1] and its diagonal zeroed
before mixing, so every mixed graph is a valid weighted graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
import torch

from smixup.graph.types import Graph
from smixup.matcher.model import GraphMatcher, assignment_matrix, embed_pairs
from smixup.numerics.kernels import VALID_NORMALIZERS
from smixup.numerics.sampling import MixRatioSpec, sample_mix_ratio

VALID_ALIGNMENTS = ("learned", "random", "identity")

SeedLike = Union[int, np.random.Generator, None]


@dataclass(frozen=True)
class MixupConfig:
    ratio_spec: MixRatioSpec = field(default_factory=MixRatioSpec)
    alignment: str = "learned"
    same_class_only: bool = False
    normalizer: str = "softmax"
    seed: int = 0

    def __post_init__(self):
        if self.alignment not in VALID_ALIGNMENTS:
            raise ValueError(f"alignment must be one of {VALID_ALIGNMENTS}, got {self.alignment!r}")
        if self.normalizer not in VALID_NORMALIZERS:
            raise ValueError(f"normalizer must be one of {VALID_NORMALIZERS}, got {self.normalizer!r}")


def _check_compatible(g1: Graph, g2: Graph) -> None:
    if g1.feature_dim != g2.feature_dim:
        raise ValueError(f"feature widths differ: {g1.feature_dim} vs {g2.feature_dim}")
    if g1.num_classes != g2.num_classes:
        raise ValueError(f"class counts differ: {g1.num_classes} vs {g2.num_classes}")


def transform_graph(g2: Graph, m) -> Graph:
    """Carry ``g2`` onto the n1 nodes indexed by the rows of ``m``."""
    m = np.asarray(m.detach().numpy() if isinstance(m, torch.Tensor) else m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != g2.n:
        raise ValueError(f"assignment of shape {m.shape} does not fit a {g2.n}-node graph")
    a = m @ g2.adjacency @ m.T
    a = np.clip((a + a.T) / 2.0, 0.0, 1.0)
    np.fill_diagonal(a, 0.0)
    return Graph(a, m @ g2.features, g2.label)


def s_mixup_pair(g1: Graph, g2: Graph, m, lam: float) -> Graph:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mix ratio must be in [0, 1], got {lam}")
    _check_compatible(g1, g2)
    m = np.asarray(m.detach().numpy() if isinstance(m, torch.Tensor) else m, dtype=np.float64)
    if m.shape[0] != g1.n:
        raise ValueError(f"assignment has {m.shape[0]} rows for a {g1.n}-node anchor")
    t = transform_graph(g2, m)
    return Graph(
        lam * g1.adjacency + (1.0 - lam) * t.adjacency,
        lam * g1.features + (1.0 - lam) * t.features,
        lam * g1.label + (1.0 - lam) * g2.label,
    )


def pad_graph(g: Graph, n: int) -> Graph:
    """Append isolated zero-feature nodes up to ``n`` nodes."""
    if n < g.n:
        raise ValueError(f"cannot pad a {g.n}-node graph down to {n}")
    if n == g.n:
        return g
    a = np.zeros((n, n))
    a[: g.n, : g.n] = g.adjacency
    x = np.zeros((n, g.feature_dim))
    x[: g.n] = g.features
    return Graph(a, x, g.label)


def random_mixup_pair(g1: Graph, g2: Graph, lam: float, seed: SeedLike = None) -> Graph:
    """Mix under a uniform random node correspondence; size max(n1, n2)."""
    _check_compatible(g1, g2)
    rng = np.random.default_rng(seed)
    n = max(g1.n, g2.n)
    perm = rng.permutation(n)
    m = np.eye(n)[perm]
    return s_mixup_pair(pad_graph(g1, n), pad_graph(g2, n), m, lam)


def _partner_order(labels: Sequence[int], same_class_only: bool, rng: np.random.Generator) -> np.ndarray:
    k = len(labels)
    if not same_class_only:
        return rng.permutation(k)
    labels = np.asarray(labels)
    order = np.arange(k)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        order[idx] = idx[rng.permutation(len(idx))]
    return order


def batch_mixup(
    batch: Sequence[Graph],
    matcher: Optional[GraphMatcher],
    cfg: MixupConfig,
    rng: Optional[np.random.Generator] = None,
) -> list[Graph]:
    """Mix each batch element (the anchor) with a shuffled partner from the batch.

    Output i has anchor i's node count, except under random alignment where
    the pair is padded to the larger size first.
    """
    if not batch:
        raise ValueError("empty batch")
    if cfg.alignment == "learned" and matcher is None:
        raise ValueError("learned alignment needs a trained matcher")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    order = _partner_order([g.class_index for g in batch], cfg.same_class_only, rng)
    pairs = [(batch[i], batch[int(j)]) for i, j in enumerate(order)]
    ratios = [sample_mix_ratio(cfg.ratio_spec, rng) for _ in pairs]

    if cfg.alignment == "random":
        return [random_mixup_pair(g1, g2, lam, rng) for (g1, g2), lam in zip(pairs, ratios)]

    if cfg.alignment == "identity":
        for g1, g2 in pairs:
            if g1.n != g2.n:
                raise ValueError(
                    f"identity alignment needs equal sizes, got {g1.n} and {g2.n} nodes"
                )
        return [s_mixup_pair(g1, g2, np.eye(g1.n), lam) for (g1, g2), lam in zip(pairs, ratios)]

    with torch.no_grad():
        embedded = embed_pairs(pairs, matcher)
        assignments = [
            assignment_matrix(h1, h2, matcher.config.metric, cfg.normalizer).numpy()
            for h1, h2 in embedded
        ]
    return [
        s_mixup_pair(g1, g2, m, lam)
        for (g1, g2), m, lam in zip(pairs, assignments, ratios)
    ]


def make_augmenter(
    matcher: Optional[GraphMatcher],
    cfg: MixupConfig,
    seed: int,
) -> Callable[[Sequence[Graph]], list[Graph]]:
    """Stateful closure mixing successive batches from one random stream."""
    rng = np.random.default_rng(seed)

    def augment(batch: Sequence[Graph]) -> list[Graph]:
        return batch_mixup(batch, matcher, cfg, rng)

    return augment
