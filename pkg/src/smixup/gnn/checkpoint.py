"""Parameter checkpoints shared by classifiers and matchers.

On disk a checkpoint is ``torch.save`` of a plain dict::

    {"format": "smixup-checkpoint", "version": 1,
     "kind": "gnn" | "matcher", "config": {...}, "state": {name: tensor}}

It is read back with ``weights_only=True``, so only tensors and primitive
containers are accepted. Tensors round-trip bitwise.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import torch

CHECKPOINT_FORMAT = "smixup-checkpoint"
CHECKPOINT_VERSION = 1
VALID_KINDS = ("gnn", "matcher")


class CheckpointError(ValueError):
    """File is not a readable checkpoint of the expected kind/version."""


def save_checkpoint(
    path: Path,
    kind: str,
    config: Mapping,
    state: Mapping[str, torch.Tensor],
) -> Path:
    if kind not in VALID_KINDS:
        raise ValueError(f"unknown checkpoint kind {kind!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "kind": kind,
        "config": dict(config),
        "state": {name: t.detach().clone() for name, t in state.items()},
    }
    torch.save(payload, path)
    return path


def load_checkpoint(path: Path, kind: str) -> tuple[dict, dict[str, torch.Tensor]]:
    """Return ``(config, state)``; raise CheckpointError on any mismatch."""
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"{path}: no such checkpoint")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise CheckpointError(f"{path}: unreadable checkpoint ({e})") from e
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path}: not a {CHECKPOINT_FORMAT} file")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint version {payload.get('version')!r}, expected {CHECKPOINT_VERSION}"
        )
    if payload.get("kind") != kind:
        raise CheckpointError(f"{path}: holds a {payload.get('kind')!r} checkpoint, expected {kind!r}")
    return dict(payload["config"]), dict(payload["state"])

