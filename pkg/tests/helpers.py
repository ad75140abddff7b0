"""Small graph builders shared by the test modules."""

import numpy as np

from smixup.graph.types import Graph, graph_from_edges, one_hot


def random_graph(rng, n, d=2, label=0, num_classes=2, density=0.5) -> Graph:
    upper = np.triu(rng.random((n, n)) < density, k=1).astype(float)
    return Graph(upper + upper.T, rng.normal(size=(n, d)), one_hot(label, num_classes))


def path_graph(n, label=0, num_classes=2, features=None) -> Graph:
    x = np.ones((n, 1)) if features is None else features
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)], one_hot(label, num_classes), x)


def permutation_matrix(perm) -> np.ndarray:
    """P with (P @ v)[i] = v[perm[i]]."""
    return np.eye(len(perm))[list(perm)]
