"""Per-dataset hyperparameter presets for the TUDataset benchmarks."""

import dataclasses
from typing import Dict, Optional


@dataclasses.dataclass(frozen=True)
class DatasetPreset:
    lr: float
    epochs: int
    batch_size: int
    matcher_layers: int
    matcher_batch_size: int
    # unattributed datasets are featurized by one-hot degree
    featurizer: Optional[str] = None


PRESET_MAP: Dict[str, DatasetPreset] = {
    "IMDB-BINARY": DatasetPreset(
        lr=0.001, epochs=300, batch_size=256,
        matcher_layers=6, matcher_batch_size=256,
        featurizer="degree-onehot",
    ),
    "PROTEINS": DatasetPreset(
        lr=0.001, epochs=300, batch_size=256,
        matcher_layers=5, matcher_batch_size=256,
    ),
    "NCI1": DatasetPreset(
        lr=0.01, epochs=500, batch_size=256,
        matcher_layers=5, matcher_batch_size=256,
    ),
    "REDDIT-BINARY": DatasetPreset(
        lr=0.01, epochs=500, batch_size=16,
        matcher_layers=4, matcher_batch_size=8,
        featurizer="degree-onehot",
    ),
    "IMDB-MULTI": DatasetPreset(
        lr=0.001, epochs=300, batch_size=256,
        matcher_layers=5, matcher_batch_size=256,
        featurizer="degree-onehot",
    ),
    "REDDIT-MULTI-5K": DatasetPreset(
        lr=0.01, epochs=500, batch_size=16,
        matcher_layers=4, matcher_batch_size=8,
        featurizer="degree-onehot",
    ),
}

ALPHA_GRID = (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0)


def preset_overrides(dataset: str) -> dict:
    """Dotted config keys a dataset preset contributes ({} for unknown names)."""
    preset = PRESET_MAP.get(dataset)
    if preset is None:
        return {}
    out = {
        "train.lr": preset.lr,
        "train.epochs": preset.epochs,
        "train.batch_size": preset.batch_size,
        "matcher.num_layers": preset.matcher_layers,
        "matcher.batch_size": preset.matcher_batch_size,
    }
    if preset.featurizer is not None:
        out["dataset.featurizer"] = preset.featurizer
    return out
