"""Dataset transforms: train/val/test splitting, label corruption, featurization."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from smixup.graph.types import GraphDataset, one_hot

VALID_FEATURIZERS = ("constant", "degree-onehot")


def split_sizes(total: int, ratios: Sequence[float]) -> list[int]:
    """Floor each share, then hand the remainder out by largest fractional part.

    Ties go to the earlier split, so (0.8, 0.1, 0.1) of 1000 is 800/100/100.
    """
    if any(r <= 0 for r in ratios):
        raise ValueError(f"split ratios must be positive, got {tuple(ratios)}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {sum(ratios)!r}")
    exact = [r * total for r in ratios]
    sizes = [math.floor(x + 1e-9) for x in exact]
    remainder = total - sum(sizes)
    by_fraction = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in by_fraction[:remainder]:
        sizes[i] += 1
    return sizes


def split_dataset(
    ds: GraphDataset,
    ratios: Sequence[float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> tuple[GraphDataset, GraphDataset, GraphDataset]:
    sizes = split_sizes(len(ds), ratios)
    if len(sizes) != 3:
        raise ValueError("expected (train, val, test) ratios")
    if any(s == 0 for s in sizes):
        raise ValueError(f"split of {len(ds)} graphs by {tuple(ratios)} leaves an empty part {sizes}")
    perm = np.random.default_rng(seed).permutation(len(ds))
    cuts = np.cumsum(sizes)[:-1]
    train, val, test = np.split(perm, cuts)
    return (
        ds.subset(train.tolist(), f"{ds.name}/train"),
        ds.subset(val.tolist(), f"{ds.name}/val"),
        ds.subset(test.tolist(), f"{ds.name}/test"),
    )


def corrupt_labels(ds: GraphDataset, ratio: float, seed: int = 0) -> GraphDataset:
    """Flip exactly round(ratio * |ds|) labels, each to a different class."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"corruption ratio must be in [0, 1], got {ratio}")
    count = int(math.floor(ratio * len(ds) + 0.5))
    if count == 0:
        return ds
    c = ds.num_classes
    if c < 2:
        raise ValueError("label corruption needs at least 2 classes")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(ds), size=count, replace=False)
    shifts = rng.integers(1, c, size=count)
    graphs = list(ds.graphs)
    for idx, shift in zip(chosen.tolist(), shifts.tolist()):
        g = graphs[idx]
        graphs[idx] = g.with_label(one_hot((g.class_index + shift) % c, c))
    return ds.replace_graphs(graphs)


def featurize_unattributed(
    ds: GraphDataset,
    scheme: str = "constant",
    cap: int = 0,
) -> GraphDataset:
    """Give an unattributed dataset node features.

    constant       -> every node gets the single feature 1
    degree-onehot  -> one-hot of min(degree, cap) over cap + 1 slots
    """
    if ds.feature_dim != 0:
        raise ValueError(f"dataset {ds.name!r} already has {ds.feature_dim} node features")
    if scheme == "constant":
        graphs = [g.with_features(np.ones((g.n, 1))) for g in ds.graphs]
        return ds.replace_graphs(graphs, feature_dim=1)
    if scheme == "degree-onehot":
        if cap < 1:
            raise ValueError(f"degree-onehot needs cap >= 1, got {cap}")
        graphs = []
        for g in ds.graphs:
            x = np.zeros((g.n, cap + 1))
            x[np.arange(g.n), np.minimum(g.degrees(), cap)] = 1.0
            graphs.append(g.with_features(x))
        return ds.replace_graphs(graphs, feature_dim=cap + 1)
    raise ValueError(f"unknown featurizer {scheme!r}; expected one of {VALID_FEATURIZERS}")


def max_degree(ds: GraphDataset) -> int:
    return int(max(int(g.degrees().max(initial=0)) for g in ds.graphs))
