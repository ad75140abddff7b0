"""Graph and dataset containers.

A ``Graph`` is dense: an n x n symmetric weight matrix with a zero diagonal,
an n x d feature matrix and a length-C label distribution. Raw graphs carry
0/1 weights and one-hot labels; mixed graphs carry weights in [0, 1] and soft
labels. Arrays are frozen on construction so graphs can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

LABEL_TOL = 1e-9


def _frozen(arr, ndim: int, name: str) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    if out.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-D, got shape {out.shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Graph:
    adjacency: np.ndarray
    features: np.ndarray
    label: np.ndarray

    def __post_init__(self):
        adjacency = _frozen(self.adjacency, 2, "adjacency")
        n = adjacency.shape[0]
        if adjacency.shape != (n, n):
            raise ValueError(f"adjacency must be square, got {adjacency.shape}")
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1 and features.size == 0:
            features = features.reshape(n, 0)
        features = _frozen(features, 2, "features")
        if features.shape[0] != n:
            raise ValueError(
                f"features have {features.shape[0]} rows for a {n}-node graph"
            )
        object.__setattr__(self, "adjacency", adjacency)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "label", _frozen(self.label, 1, "label"))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_classes(self) -> int:
        return self.label.shape[0]

    @property
    def class_index(self) -> int:
        """Argmax of the label (the class of a one-hot label)."""
        return int(np.argmax(self.label))

    def degrees(self) -> np.ndarray:
        """Unweighted degree: number of nonzero-weight neighbors per node."""
        return (self.adjacency > 0).sum(axis=1)

    def with_label(self, label) -> "Graph":
        return Graph(self.adjacency, self.features, label)

    def with_features(self, features) -> "Graph":
        return Graph(self.adjacency, features, self.label)

    def permuted(self, perm: Sequence[int]) -> "Graph":
        """Relabel nodes: node ``perm[i]`` of self becomes node ``i``."""
        p = np.asarray(perm, dtype=int)
        return Graph(self.adjacency[np.ix_(p, p)], self.features[p], self.label)

    def same_as(self, other: "Graph", atol: float = 0.0) -> bool:
        """Field-wise equality (exact by default)."""
        if self.adjacency.shape != other.adjacency.shape:
            return False
        if self.features.shape != other.features.shape:
            return False
        if self.label.shape != other.label.shape:
            return False
        return (
            np.allclose(self.adjacency, other.adjacency, rtol=0, atol=atol)
            and np.allclose(self.features, other.features, rtol=0, atol=atol)
            and np.allclose(self.label, other.label, rtol=0, atol=atol)
        )


def one_hot(index: int, num_classes: int) -> np.ndarray:
    y = np.zeros(num_classes, dtype=np.float64)
    y[index] = 1.0
    return y


def graph_from_edges(
    n: int,
    edges,
    label,
    features=None,
) -> Graph:
    """Build a 0/1 graph from an undirected edge list over nodes 0..n-1."""
    adjacency = np.zeros((n, n), dtype=np.float64)
    for u, v in edges:
        if u == v:
            continue
        adjacency[u, v] = adjacency[v, u] = 1.0
    if features is None:
        features = np.zeros((n, 0))
    return Graph(adjacency, features, label)


def validate_graph(g: Graph, *, raw: bool = False, tol: float = LABEL_TOL) -> None:
    """Raise ValueError naming the first broken Graph invariant.

    ``raw=True`` additionally requires 0/1 weights (ingested, unmixed graphs).
    """
    a = g.adjacency
    if g.n < 1:
        raise ValueError("graph has no nodes")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency is not symmetric")
    if np.any(np.diag(a) != 0):
        raise ValueError("adjacency diagonal is not zero")
    if np.any(a < 0) or np.any(a > 1):
        raise ValueError("adjacency weights outside [0, 1]")
    if raw and not np.all((a == 0) | (a == 1)):
        raise ValueError("raw graph has non-binary adjacency weights")
    if not np.all(np.isfinite(g.features)):
        raise ValueError("non-finite node features")
    if np.any(g.label < 0):
        raise ValueError("negative label entry")
    if abs(float(g.label.sum()) - 1.0) > tol:
        raise ValueError(f"label sums to {g.label.sum()!r}, expected 1")


@dataclass(frozen=True)
class GraphDataset:
    graphs: tuple[Graph, ...]
    num_classes: int
    feature_dim: int
    name: str = "dataset"
    # original label value per class id, when ingested from files
    class_values: Optional[tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        graphs = tuple(self.graphs)
        object.__setattr__(self, "graphs", graphs)
        if not graphs:
            raise ValueError(f"dataset {self.name!r} is empty")
        for i, g in enumerate(graphs):
            if g.num_classes != self.num_classes:
                raise ValueError(
                    f"graph {i} label has length {g.num_classes}, "
                    f"dataset has {self.num_classes} classes"
                )
            if g.feature_dim != self.feature_dim:
                raise ValueError(
                    f"graph {i} has feature width {g.feature_dim}, "
                    f"dataset has {self.feature_dim}"
                )

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self) -> Iterator[Graph]:
        return iter(self.graphs)

    def __getitem__(self, i: int) -> Graph:
        return self.graphs[i]

    @property
    def labels(self) -> np.ndarray:
        """Class index per graph (argmax of each label)."""
        return np.array([g.class_index for g in self.graphs], dtype=int)

    def subset(self, indices: Sequence[int], name: Optional[str] = None) -> "GraphDataset":
        return GraphDataset(
            graphs=tuple(self.graphs[i] for i in indices),
            num_classes=self.num_classes,
            feature_dim=self.feature_dim,
            name=name or self.name,
            class_values=self.class_values,
        )

    def replace_graphs(self, graphs: Sequence[Graph], feature_dim: Optional[int] = None) -> "GraphDataset":
        return GraphDataset(
            graphs=tuple(graphs),
            num_classes=self.num_classes,
            feature_dim=self.feature_dim if feature_dim is None else feature_dim,
            name=self.name,
            class_values=self.class_values,
        )

    def same_as(self, other: "GraphDataset") -> bool:
        return (
            self.num_classes == other.num_classes
            and self.feature_dim == other.feature_dim
            and len(self) == len(other)
            and all(a.same_as(b) for a, b in zip(self.graphs, other.graphs))
        )
