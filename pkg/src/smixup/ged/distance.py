"""Graph edit distances under one edit-cost model.

Costs, with adjacency counted over the full (symmetric) matrix so each
undirected edge contributes twice:

    node substitution  c(x - x')          node insert/delete  c(x)
    edge substitution  2 |w - w'|         edge insert/delete  2 w

where ``c`` is the squared l2 norm (``feature_cost="squared"``) or the l2
norm (``feature_cost="norm"``). ``aligned_ged`` is the cost of the identity
node mapping between same-size graphs; ``exact_ged`` minimizes over all
partial injective mappings and is only meant as an oracle on tiny graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import networkx as nx
import numpy as np

from smixup.config import GED_NODE_LIMIT
from smixup.graph.types import Graph

VALID_FEATURE_COSTS = ("squared", "norm")

# relative slack under which two edit paths count as equally cheap
TIE_TOL = 1e-12


class GedUndefinedError(ArithmeticError):
    """A normalized distance or bound has a zero denominator."""


@dataclass(frozen=True)
class EditCostModel:
    feature_cost: str = "squared"

    def __post_init__(self):
        if self.feature_cost not in VALID_FEATURE_COSTS:
            raise ValueError(
                f"feature_cost must be one of {VALID_FEATURE_COSTS}, got {self.feature_cost!r}"
            )

    def node_costs(self, diff: np.ndarray) -> np.ndarray:
        """Per-row cost of a stack of feature differences."""
        diff = np.atleast_2d(diff)
        sq = (diff * diff).sum(axis=1)
        return sq if self.feature_cost == "squared" else np.sqrt(sq)

    def node_cost(self, diff) -> float:
        return float(self.node_costs(np.asarray(diff, dtype=np.float64))[0])


DEFAULT_COST = EditCostModel()


@dataclass(frozen=True)
class GedResult:
    cost: float
    # mapping[i] is the node of the second graph that node i maps to, or None (deleted)
    mapping: Optional[tuple[Optional[int], ...]] = None


def aligned_ged(ga: Graph, gb: Graph, cost: EditCostModel = DEFAULT_COST) -> float:
    if ga.n != gb.n:
        raise ValueError(f"aligned distance needs equal node counts, got {ga.n} and {gb.n}")
    if ga.feature_dim != gb.feature_dim:
        raise ValueError(f"feature widths differ: {ga.feature_dim} vs {gb.feature_dim}")
    edges = float(np.abs(ga.adjacency - gb.adjacency).sum())
    if ga.n == 0:
        return edges
    return edges + float(cost.node_costs(ga.features - gb.features).sum())


def mapping_cost(
    ga: Graph,
    gb: Graph,
    mapping: tuple[Optional[int], ...],
    cost: EditCostModel = DEFAULT_COST,
) -> float:
    """Edit cost of a partial injective node mapping from ``ga`` to ``gb``."""
    if len(mapping) != ga.n:
        raise ValueError(f"mapping covers {len(mapping)} nodes of a {ga.n}-node graph")
    targets = [j for j in mapping if j is not None]
    if len(set(targets)) != len(targets) or any(not 0 <= j < gb.n for j in targets):
        raise ValueError(f"mapping {mapping} is not injective into {gb.n} nodes")

    total = 0.0
    for i, j in enumerate(mapping):
        diff = ga.features[i] if j is None else ga.features[i] - gb.features[j]
        total += cost.node_cost(diff)
    covered = set(targets)
    for j in range(gb.n):
        if j not in covered:
            total += cost.node_cost(gb.features[j])

    # edges of ga, as seen through the mapping
    image = np.zeros((ga.n, ga.n))
    mapped = [i for i, j in enumerate(mapping) if j is not None]
    for u in mapped:
        for v in mapped:
            image[u, v] = gb.adjacency[mapping[u], mapping[v]]
    total += float(np.abs(ga.adjacency - image).sum())
    # edges of gb not between two mapped nodes are inserted
    inserted = gb.adjacency.copy()
    for u in targets:
        for v in targets:
            inserted[u, v] = 0.0
    total += float(inserted.sum())
    return total


def _to_nx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    for i in range(g.n):
        out.add_node(i, x=g.features[i])
    rows, cols = np.nonzero(np.triu(g.adjacency))
    for u, v in zip(rows.tolist(), cols.tolist()):
        out.add_edge(u, v, w=float(g.adjacency[u, v]))
    return out


def exact_ged(
    ga: Graph,
    gb: Graph,
    node_limit: int = GED_NODE_LIMIT,
    cost: EditCostModel = DEFAULT_COST,
) -> GedResult:
    """Minimum edit cost over all node mappings, with a witness mapping."""
    if max(ga.n, gb.n) > node_limit:
        raise ValueError(
            f"exact distance limited to {node_limit} nodes, got {ga.n} and {gb.n}"
        )
    if ga.feature_dim != gb.feature_dim:
        raise ValueError(f"feature widths differ: {ga.feature_dim} vs {gb.feature_dim}")
    if ga.n == 0 or gb.n == 0:
        mapping = tuple(None for _ in range(ga.n))
        return GedResult(mapping_cost(ga, gb, mapping, cost), mapping)

    # all paths no worse than the running minimum, so every optimal mapping is seen
    candidates = []
    for node_path, _, _ in nx.optimize_edit_paths(
        _to_nx(ga),
        _to_nx(gb),
        node_subst_cost=lambda a, b: cost.node_cost(a["x"] - b["x"]),
        node_del_cost=lambda a: cost.node_cost(a["x"]),
        node_ins_cost=lambda b: cost.node_cost(b["x"]),
        edge_subst_cost=lambda a, b: 2.0 * abs(a["w"] - b["w"]),
        edge_del_cost=lambda a: 2.0 * a["w"],
        edge_ins_cost=lambda b: 2.0 * b["w"],
        strictly_decreasing=False,
    ):
        mapping = [None] * ga.n
        for u, v in node_path:
            if u is not None:
                mapping[u] = v
        candidates.append(tuple(mapping))
    return _cheapest(ga, gb, candidates, cost)


def _cheapest(
    ga: Graph,
    gb: Graph,
    candidates: list[tuple[Optional[int], ...]],
    cost: EditCostModel,
) -> GedResult:
    """Minimum-cost witness; ties go to the lexicographically smallest mapping (deletions last)."""
    costs = {m: mapping_cost(ga, gb, m, cost) for m in candidates}
    lowest = min(costs.values())
    tol = TIE_TOL * max(1.0, lowest)
    tied = [m for m, c in costs.items() if c <= lowest + tol]
    mapping = min(tied, key=lambda m: tuple(gb.n if j is None else j for j in m))
    return GedResult(costs[mapping], mapping)
