"""Synthetic MOTIF dataset: one random base structure plus one class motif.

Shapes (node ids local to the motif):

    cycle   5-cycle 0-1-2-3-4
    house   4-cycle 0-1-2-3 plus roof node 4 joined to 0 and 1
    crane   4-cycle 0-1-2-3 plus pendant 4 on 0 and pendant 5 on 2

Bases are a random recursive tree, a 2 x k ladder of at most three rungs, or a
wheel whose rim has at least six nodes. Base and motif are joined by exactly
one edge between a uniform base node and a uniform motif node, and the node
order is shuffled. A draw that contains another class's motif as an induced
subgraph is rejected and redrawn, so the only class motif present is the
labelled one. Every node carries the constant feature 1, so the class is
visible only through topology.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism

from smixup.graph.types import Graph, GraphDataset, one_hot

MOTIF_EDGES: dict[str, tuple[tuple[int, int], ...]] = {
    "cycle": ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0)),
    "house": ((0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1)),
    "crane": ((0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (5, 2)),
}
VALID_BASES = ("tree", "ladder", "wheel")

# a 4-rung ladder holds an induced crane; a 5-node rim is an induced 5-cycle
LADDER_MAX_RUNGS = 3
WHEEL_MIN_SIZE = 7
MAX_DRAWS = 100


@dataclass(frozen=True)
class MotifConfig:
    motifs: tuple[str, ...] = ("cycle", "house", "crane")
    bases: tuple[str, ...] = VALID_BASES
    base_size: tuple[int, int] = (6, 12)
    count_per_class: int = 500
    seed: int = 0

    def __post_init__(self):
        if not self.motifs:
            raise ValueError("motif set is empty")
        if not self.bases:
            raise ValueError("base set is empty")
        for m in self.motifs:
            if m not in MOTIF_EDGES:
                raise ValueError(f"unknown motif {m!r}; expected one of {tuple(MOTIF_EDGES)}")
        for b in self.bases:
            if b not in VALID_BASES:
                raise ValueError(f"unknown base {b!r}; expected one of {VALID_BASES}")
        lo, hi = self.base_size
        if lo < 4 or hi < lo:
            raise ValueError(f"base size range must satisfy 4 <= min <= max, got {self.base_size}")
        if self.count_per_class < 1:
            raise ValueError("count per class must be >= 1")


def motif_graph(kind: str) -> nx.Graph:
    g = nx.Graph()
    edges = MOTIF_EDGES[kind]
    g.add_nodes_from(range(1 + max(max(e) for e in edges)))
    g.add_edges_from(edges)
    return g


def base_graph(kind: str, size: int, rng: np.random.Generator) -> nx.Graph:
    if kind == "tree":
        g = nx.Graph()
        g.add_node(0)
        for v in range(1, size):
            g.add_edge(v, int(rng.integers(v)))
        return g
    if kind == "ladder":
        return nx.ladder_graph(min(max(2, size // 2), LADDER_MAX_RUNGS))
    if kind == "wheel":
        return nx.wheel_graph(max(size, WHEEL_MIN_SIZE))
    raise ValueError(f"unknown base {kind!r}")


def _compose(base: nx.Graph, motif: nx.Graph, rng: np.random.Generator) -> nx.Graph:
    offset = base.number_of_nodes()
    g = nx.union(base, nx.relabel_nodes(motif, {v: v + offset for v in motif}))
    u = int(rng.integers(base.number_of_nodes()))
    v = offset + int(rng.integers(motif.number_of_nodes()))
    g.add_edge(u, v)
    return g


def contains_motif(g: nx.Graph, kind: str) -> bool:
    """True when ``g`` has the motif as an induced subgraph."""
    return isomorphism.GraphMatcher(g, motif_graph(kind)).subgraph_is_isomorphic()


def _draw(
    config: MotifConfig,
    kind: str,
    rivals: list[str],
    rng: np.random.Generator,
) -> nx.Graph:
    lo, hi = config.base_size
    motif = motif_graph(kind)
    for _ in range(MAX_DRAWS):
        base_kind = config.bases[int(rng.integers(len(config.bases)))]
        size = int(rng.integers(lo, hi + 1))
        g = _compose(base_graph(base_kind, size, rng), motif, rng)
        if not any(contains_motif(g, other) for other in rivals):
            return g
    raise ValueError(f"no {kind!r} graph free of {rivals} in {MAX_DRAWS} draws; check motifs and bases")


def gen_motif_dataset(config: MotifConfig) -> GraphDataset:
    rng = np.random.default_rng(config.seed)
    num_classes = len(config.motifs)
    graphs = []
    for cls, kind in enumerate(config.motifs):
        rivals = [m for m in config.motifs if m != kind]
        for _ in range(config.count_per_class):
            g = _draw(config, kind, rivals, rng)
            n = g.number_of_nodes()
            order = rng.permutation(n)
            a = nx.to_numpy_array(g, nodelist=sorted(g.nodes), dtype=np.float64)
            a = a[np.ix_(order, order)]
            graphs.append(Graph(a, np.ones((n, 1)), one_hot(cls, num_classes)))
    return GraphDataset(
        graphs=tuple(graphs),
        num_classes=num_classes,
        feature_dim=1,
        name="MOTIF",
    )


def to_networkx(g: Graph) -> nx.Graph:
    """Unweighted networkx view of a graph's support (weight > 0)."""
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    rows, cols = np.nonzero(np.triu(g.adjacency, k=1))
    out.add_edges_from(zip(rows.tolist(), cols.tolist()))
    return out
