"""Normalized GED of a mixed graph and the bound on its distance from lambda.

For a mixed graph G' of (G1, G2) with aligned G2' = M G2:

    eps   = d(G', G2) / (d(G', G1) + d(G', G2))
    bound = (1 - lam) d(G2, G2') / (d(G1, G2') + d(G2, G2'))

and |eps - lam| <= bound. In ``aligned-chain`` mode every same-size distance
is the aligned (identity mapping) cost and the G2 leg is routed through G2':
d(G', G2) = aligned(G', G2') + exact(G2', G2). ``exact`` mode uses the exact
oracle everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import spearmanr

from smixup.config import GED_NODE_LIMIT
from smixup.ged.distance import (
    DEFAULT_COST,
    EditCostModel,
    GedUndefinedError,
    aligned_ged,
    exact_ged,
)
from smixup.graph.types import Graph, one_hot
from smixup.mixup.core import s_mixup_pair, transform_graph
from smixup.numerics.kernels import column_softmax

VALID_MODES = ("aligned-chain", "exact")
LAMBDA_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


@dataclass(frozen=True)
class NormalizedGed:
    epsilon: float
    d1: float  # distance to the first parent
    d2: float  # distance to the second parent


def _check_mode(mode: str) -> None:
    if mode not in VALID_MODES:
        raise ValueError(f"mode must be one of {VALID_MODES}, got {mode!r}")


def _ratio(num: float, den: float, what: str) -> float:
    if den == 0.0:
        raise GedUndefinedError(f"{what} is undefined: both distances are zero")
    return num / den


def normalized_ged(
    gmix: Graph,
    g1: Graph,
    g2: Graph,
    mode: str = "aligned-chain",
    g2_aligned: Optional[Graph] = None,
    cost: EditCostModel = DEFAULT_COST,
    tail: Optional[float] = None,
    node_limit: int = GED_NODE_LIMIT,
) -> NormalizedGed:
    """``tail`` optionally supplies exact(G2', G2) when sweeping many mixes of one pair."""
    _check_mode(mode)
    if mode == "exact":
        d1 = exact_ged(gmix, g1, node_limit, cost).cost
        d2 = exact_ged(gmix, g2, node_limit, cost).cost
    else:
        if g2_aligned is None:
            raise ValueError("aligned-chain mode needs the aligned second graph")
        if not gmix.n == g1.n == g2_aligned.n:
            raise ValueError(
                f"aligned-chain mode needs equal sizes, got {gmix.n}, {g1.n} and {g2_aligned.n}"
            )
        if tail is None:
            tail = exact_ged(g2_aligned, g2, node_limit, cost).cost
        d1 = aligned_ged(gmix, g1, cost)
        d2 = aligned_ged(gmix, g2_aligned, cost) + tail
    return NormalizedGed(_ratio(d2, d1 + d2, "normalized GED"), d1, d2)


def bound_legs(
    g1: Graph,
    g2: Graph,
    g2_aligned: Graph,
    mode: str = "aligned-chain",
    cost: EditCostModel = DEFAULT_COST,
    node_limit: int = GED_NODE_LIMIT,
) -> tuple[float, float]:
    """(d(G1, G2'), d(G2, G2')) for the bound."""
    _check_mode(mode)
    if g2_aligned.n != g1.n:
        raise ValueError(f"aligned graph has {g2_aligned.n} nodes, anchor has {g1.n}")
    if mode == "exact":
        a = exact_ged(g1, g2_aligned, node_limit, cost).cost
    else:
        a = aligned_ged(g1, g2_aligned, cost)
    b = exact_ged(g2, g2_aligned, node_limit, cost).cost
    return a, b


def ratio_bound(
    g1: Graph,
    g2: Graph,
    g2_aligned: Graph,
    lam: float,
    mode: str = "aligned-chain",
    cost: EditCostModel = DEFAULT_COST,
    legs: Optional[tuple[float, float]] = None,
    node_limit: int = GED_NODE_LIMIT,
) -> float:
    """Upper bound on |eps - lam|; in [0, 1 - lam]."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mix ratio must be in [0, 1], got {lam}")
    a, b = legs if legs is not None else bound_legs(g1, g2, g2_aligned, mode, cost, node_limit)
    return (1.0 - lam) * _ratio(b, a + b, "bound")


# ---------------------------------------------------------------------------
# Sweep over random tiny pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundRow:
    pair: int
    lam: float
    epsilon: float
    bound: float
    gap: float
    mode: str
    cost: str

    @property
    def violated(self) -> bool:
        return self.gap > self.bound + 1e-9


@dataclass(frozen=True)
class BoundSweep:
    rows: list[BoundRow]
    rank_correlations: list[float]
    skipped: int

    @property
    def violations(self) -> int:
        return sum(r.violated for r in self.rows)


def random_graph(
    rng: np.random.Generator,
    n: int,
    feature_dim: int = 2,
    density: float = 0.5,
    label: int = 0,
    num_classes: int = 2,
) -> Graph:
    upper = np.triu(rng.random((n, n)) < density, k=1).astype(np.float64)
    return Graph(upper + upper.T, rng.random((n, feature_dim)), one_hot(label, num_classes))


def random_pair(
    rng: np.random.Generator,
    max_nodes: int = 6,
    feature_dim: int = 2,
) -> tuple[Graph, Graph, np.ndarray]:
    """Two random graphs of different classes and a random soft assignment."""
    n1 = int(rng.integers(1, max_nodes + 1))
    n2 = int(rng.integers(1, max_nodes + 1))
    g1 = random_graph(rng, n1, feature_dim, label=0)
    g2 = random_graph(rng, n2, feature_dim, label=1)
    m = column_softmax(rng.normal(size=(n1, n2)) * 2.0).numpy()
    return g1, g2, m


def verify_bound(
    pairs: int = 500,
    lambdas: Sequence[float] = LAMBDA_GRID,
    mode: str = "aligned-chain",
    cost: EditCostModel = DEFAULT_COST,
    max_nodes: int = 6,
    seed: int = 0,
) -> BoundSweep:
    """Check |eps - lam| <= bound over random pairs and a lambda grid.

    Pairs whose distances are all zero are skipped and counted.
    """
    _check_mode(mode)
    rng = np.random.default_rng(seed)
    rows: list[BoundRow] = []
    correlations: list[float] = []
    skipped = 0
    for p in range(pairs):
        g1, g2, m = random_pair(rng, max_nodes)
        g2_aligned = transform_graph(g2, m)
        try:
            legs = bound_legs(g1, g2, g2_aligned, mode, cost)
            tail = legs[1]
            pair_rows = []
            for lam in lambdas:
                mix = s_mixup_pair(g1, g2, m, lam)
                eps = normalized_ged(mix, g1, g2, mode, g2_aligned, cost, tail=tail).epsilon
                bound = ratio_bound(g1, g2, g2_aligned, lam, mode, cost, legs=legs)
                pair_rows.append(BoundRow(p, lam, eps, bound, abs(eps - lam), mode, cost.feature_cost))
        except GedUndefinedError:
            skipped += 1
            continue
        rows.extend(pair_rows)
        if len(pair_rows) > 1:
            rho = spearmanr([r.lam for r in pair_rows], [r.epsilon for r in pair_rows])[0]
            correlations.append(float(rho))
    return BoundSweep(rows, correlations, skipped)
