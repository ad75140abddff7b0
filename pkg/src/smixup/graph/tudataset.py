"""TUDataset flat-file ingestion and export.

Layout under ``directory`` for dataset ``NAME`` (all ids 1-based):

    NAME_A.txt                 "i, j" per line; each undirected edge twice
    NAME_graph_indicator.txt   graph id per node line
    NAME_graph_labels.txt      integer label per graph line
    NAME_node_attributes.txt   optional, comma-separated reals per node line
    NAME_node_labels.txt       optional, integer per node line

Node attributes become feature columns; integer node labels are appended as a
one-hot block (ordered by sorted label value). Graph labels are remapped to
0..C-1 by sorted original value. Every format problem is reported with the
file and the 1-based line number.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np

from smixup.graph.types import Graph, GraphDataset, one_hot


class DatasetFormatError(ValueError):
    def __init__(self, path: Path, line: Optional[int], reason: str):
        self.path = Path(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{where}: {reason}")


def _read_lines(path: Path) -> list[str]:
    """Non-empty lines with their whitespace stripped (trailing blank lines ok)."""
    lines = path.read_text().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    return [line.strip() for line in lines]


def _parse_int(path: Path, lineno: int, token: str) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise DatasetFormatError(path, lineno, f"expected an integer, got {token!r}")


def _require(directory: Path, name: str, suffix: str) -> Path:
    path = directory / f"{name}_{suffix}.txt"
    if not path.exists():
        raise DatasetFormatError(path, None, "missing mandatory file")
    return path


def _optional(directory: Path, name: str, suffix: str) -> Optional[Path]:
    path = directory / f"{name}_{suffix}.txt"
    return path if path.exists() else None


def load_tudataset(directory, name: str) -> GraphDataset:
    directory = Path(directory)
    a_path = _require(directory, name, "A")
    ind_path = _require(directory, name, "graph_indicator")
    lab_path = _require(directory, name, "graph_labels")
    attr_path = _optional(directory, name, "node_attributes")
    nlab_path = _optional(directory, name, "node_labels")

    raw_labels = [
        _parse_int(lab_path, i + 1, tok) for i, tok in enumerate(_read_lines(lab_path))
    ]
    num_graphs = len(raw_labels)
    if num_graphs == 0:
        raise DatasetFormatError(lab_path, None, "no graph labels")

    indicator = []
    for i, tok in enumerate(_read_lines(ind_path)):
        gid = _parse_int(ind_path, i + 1, tok)
        if not 1 <= gid <= num_graphs:
            raise DatasetFormatError(
                ind_path,
                i + 1,
                f"graph id {gid} does not exist ({lab_path.name} has {num_graphs} lines)",
            )
        indicator.append(gid - 1)
    indicator = np.asarray(indicator, dtype=int)
    num_nodes = indicator.size
    counts = np.bincount(indicator, minlength=num_graphs)
    if np.any(counts == 0):
        missing = int(np.flatnonzero(counts == 0)[0]) + 1
        raise DatasetFormatError(ind_path, None, f"graph id {missing} has no nodes")
    # local index of each global node inside its graph
    local = np.zeros(num_nodes, dtype=int)
    seen = np.zeros(num_graphs, dtype=int)
    for v, gid in enumerate(indicator):
        local[v] = seen[gid]
        seen[gid] += 1

    adjacency = [np.zeros((c, c), dtype=np.float64) for c in counts]
    for i, line in enumerate(_read_lines(a_path)):
        parts = line.split(",")
        if len(parts) != 2:
            raise DatasetFormatError(a_path, i + 1, f"expected 'i, j', got {line!r}")
        u, v = (_parse_int(a_path, i + 1, p) - 1 for p in parts)
        for node in (u, v):
            if not 0 <= node < num_nodes:
                raise DatasetFormatError(
                    a_path, i + 1, f"node index {node + 1} out of range 1..{num_nodes}"
                )
        if indicator[u] != indicator[v]:
            raise DatasetFormatError(
                a_path, i + 1, f"edge ({u + 1}, {v + 1}) crosses graphs"
            )
        if u == v:
            continue
        a = adjacency[indicator[u]]
        a[local[u], local[v]] = a[local[v], local[u]] = 1.0

    blocks: list[np.ndarray] = []
    if attr_path is not None:
        rows: list[list[float]] = []
        for i, line in enumerate(_read_lines(attr_path)):
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError:
                raise DatasetFormatError(attr_path, i + 1, f"bad attribute row {line!r}")
            if rows and len(row) != len(rows[0]):
                raise DatasetFormatError(
                    attr_path,
                    i + 1,
                    f"ragged attribute row: {len(row)} values, expected {len(rows[0])}",
                )
            rows.append(row)
        if len(rows) != num_nodes:
            raise DatasetFormatError(
                attr_path, None, f"{len(rows)} attribute rows for {num_nodes} nodes"
            )
        blocks.append(np.asarray(rows, dtype=np.float64))
    if nlab_path is not None:
        node_labels = [
            _parse_int(nlab_path, i + 1, tok)
            for i, tok in enumerate(_read_lines(nlab_path))
        ]
        if len(node_labels) != num_nodes:
            raise DatasetFormatError(
                nlab_path, None, f"{len(node_labels)} node labels for {num_nodes} nodes"
            )
        values = sorted(set(node_labels))
        slot = {val: k for k, val in enumerate(values)}
        onehot = np.zeros((num_nodes, len(values)), dtype=np.float64)
        onehot[np.arange(num_nodes), [slot[val] for val in node_labels]] = 1.0
        blocks.append(onehot)
    features = (
        np.concatenate(blocks, axis=1) if blocks else np.zeros((num_nodes, 0))
    )

    class_values = sorted(set(raw_labels))
    class_of = {val: k for k, val in enumerate(class_values)}
    num_classes = len(class_values)

    graphs = []
    for gid in range(num_graphs):
        mask = indicator == gid
        graphs.append(
            Graph(
                adjacency[gid],
                features[mask],
                one_hot(class_of[raw_labels[gid]], num_classes),
            )
        )
    return GraphDataset(
        graphs=tuple(graphs),
        num_classes=num_classes,
        feature_dim=features.shape[1],
        name=name,
        class_values=tuple(class_values),
    )


def write_tudataset(ds: GraphDataset, directory, name: Optional[str] = None) -> Path:
    """Write ``ds`` in TUDataset layout; the inverse of :func:`load_tudataset`.

    Only 0/1 graphs with one-hot labels can be written. Features are written as
    ``node_attributes``; graph labels use the original class values when the
    dataset remembers them, otherwise the class ids.
    """
    name = name or ds.name
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    class_values = ds.class_values or tuple(range(ds.num_classes))

    edge_lines, ind_lines, label_lines, attr_lines = [], [], [], []
    offset = 0
    for gid, g in enumerate(ds.graphs):
        a = g.adjacency
        if not np.all((a == 0) | (a == 1)):
            raise ValueError(f"graph {gid} has fractional edge weights")
        if not np.array_equal(g.label, one_hot(g.class_index, ds.num_classes)):
            raise ValueError(f"graph {gid} has a soft label")
        for u, v in zip(*np.nonzero(a)):
            edge_lines.append(f"{offset + u + 1}, {offset + v + 1}")
        ind_lines.extend([str(gid + 1)] * g.n)
        label_lines.append(str(class_values[g.class_index]))
        for row in g.features:
            attr_lines.append(", ".join(repr(float(x)) for x in row))
        offset += g.n

    def _write(suffix: str, lines: list[str]) -> None:
        text = "\n".join(lines) + ("\n" if lines else "")
        (directory / f"{name}_{suffix}.txt").write_text(text)

    _write("A", edge_lines)
    _write("graph_indicator", ind_lines)
    _write("graph_labels", label_lines)
    if ds.feature_dim > 0:
        _write("node_attributes", attr_lines)
    return directory
