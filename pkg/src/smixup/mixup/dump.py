"""Line-oriented dump of (mixed) graphs for inspection.

Layout, one record per graph::

    # smixup-graph-dump 1
    graph <n> <d> <C>
    <n lines: adjacency row, n floats>
    <n lines: feature row, d floats>
    <1 line: label, C floats>

Floats are written with ``repr`` and so read back exactly. Rows of width 0
are empty lines.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np

from smixup.graph.tudataset import DatasetFormatError
from smixup.graph.types import Graph

DUMP_HEADER = "# smixup-graph-dump 1"


def _row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def write_graph_dump(graphs: Iterable[Graph], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [DUMP_HEADER]
    for g in graphs:
        lines.append(f"graph {g.n} {g.feature_dim} {g.num_classes}")
        lines.extend(_row(r) for r in g.adjacency)
        lines.extend(_row(r) for r in g.features)
        lines.append(_row(g.label))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_graph_dump(path: Path) -> list[Graph]:
    path = Path(path)
    lines = path.read_text().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != DUMP_HEADER:
        raise DatasetFormatError(path, 1, f"missing header {DUMP_HEADER!r}")

    def floats(lineno: int, width: int) -> list[float]:
        if lineno > len(lines):
            raise DatasetFormatError(path, lineno, "unexpected end of file")
        text = lines[lineno - 1].split()
        try:
            row = [float(t) for t in text]
        except ValueError:
            raise DatasetFormatError(path, lineno, "non-numeric value") from None
        if len(row) != width:
            raise DatasetFormatError(path, lineno, f"expected {width} values, got {len(row)}")
        return row

    graphs = []
    lineno = 2
    while lineno <= len(lines):
        head = lines[lineno - 1].split()
        if len(head) != 4 or head[0] != "graph":
            raise DatasetFormatError(path, lineno, "expected 'graph <n> <d> <C>'")
        try:
            n, d, c = (int(t) for t in head[1:])
        except ValueError:
            raise DatasetFormatError(path, lineno, "non-integer graph header") from None
        start = lineno + 1
        a = [floats(start + i, n) for i in range(n)]
        x = [floats(start + n + i, d) for i in range(n)]
        y = floats(start + 2 * n, c)
        try:
            graphs.append(
                Graph(np.array(a).reshape(n, n), np.array(x).reshape(n, d), np.array(y))
            )
        except ValueError as e:
            raise DatasetFormatError(path, lineno, str(e)) from None
        lineno = start + 2 * n + 1
    return graphs
