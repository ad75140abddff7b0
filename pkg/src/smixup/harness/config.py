"""Experiment configuration: config files, dotted keys, presets, overrides.

A config file is ``key = value`` lines with dotted keys, values parsed like
``--set`` values::

    # exp.conf
    dataset.name = PROTEINS
    mixup.alpha = 0.2
    sweep.alpha = [0.1, 0.2, 0.5]

Files ending in ``.yaml``/``.yml`` are read as YAML instead, where keys may be
nested or dotted, so these are equivalent::

    mixup:
      alpha: 0.2
    mixup.alpha: 0.2

Resolution order, later wins: built-in defaults -> dataset preset (by
``dataset.name``) -> config file -> ``--set key=value`` overrides. Every key
is checked against ``SCHEMA``; unknown keys and badly typed values raise
``ConfigError`` naming the key.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import yaml

from smixup.config import DEFAULT_SEED, runs_dir, tudataset_root
from smixup.gnn.model import GnnConfig
from smixup.graph.motif import MotifConfig
from smixup.harness.presets import preset_overrides
from smixup.matcher.model import MatcherConfig
from smixup.matcher.train import MatcherTrainConfig
from smixup.mixup.core import MixupConfig
from smixup.numerics.sampling import MixRatioSpec

_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")


class ConfigError(ValueError):
    """Invalid experiment configuration (unknown key, bad value, bad reference)."""


# key -> (kind, default); kinds: int, float, bool, str, str?, floats, floats?, strs
SCHEMA: dict[str, tuple[str, Any]] = {
    "experiment.name": ("str", "experiment"),
    "experiment.runs": ("int", 10),
    "experiment.seed": ("int", DEFAULT_SEED),
    "experiment.include_vanilla": ("bool", False),
    "experiment.out_dir": ("str?", None),
    "dataset.source": ("str", "motif"),
    "dataset.name": ("str", "MOTIF"),
    "dataset.path": ("str?", None),
    "dataset.featurizer": ("str?", None),
    "dataset.degree_cap": ("int", 0),
    "dataset.split": ("floats", [0.8, 0.1, 0.1]),
    "motif.motifs": ("strs", ["cycle", "house", "crane"]),
    "motif.bases": ("strs", ["tree", "ladder", "wheel"]),
    "motif.base_size": ("ints", [6, 12]),
    "motif.count_per_class": ("int", 500),
    "motif.seed": ("int", 0),
    "model.backbone": ("str", "gcn"),
    "model.num_layers": ("int", 4),
    "model.hidden": ("int", 32),
    "model.readout": ("str", "mean"),
    "model.head_layers": ("int", 1),
    "train.lr": ("float", 0.001),
    "train.epochs": ("int", 300),
    "train.batch_size": ("int", 256),
    "train.corrupt_ratio": ("float", 0.0),
    "mixup.enabled": ("bool", False),
    "mixup.alignment": ("str", "learned"),
    "mixup.alpha": ("float", 0.2),
    "mixup.range": ("str", "half"),
    "mixup.normalizer": ("str", "softmax"),
    "mixup.same_class_only": ("bool", False),
    "matcher.checkpoint": ("str?", None),
    "matcher.train": ("bool", True),
    "matcher.num_layers": ("int", 5),
    "matcher.hidden": ("int", 256),
    "matcher.metric": ("str", "cosine"),
    "matcher.epochs": ("int", 500),
    "matcher.lr": ("float", 0.001),
    "matcher.batch_size": ("int", 256),
    "matcher.margin": ("float", 1.0),
    "sweep.alpha": ("floats?", None),
}

VALID_SOURCES = ("motif", "tudataset")
YAML_SUFFIXES = (".yaml", ".yml")


def validate_name(name: str) -> str:
    """Experiment names become directory names: letters, digits, ``.``, ``_``, ``-``."""
    name = name.strip()
    if not _NAME_RE.fullmatch(name) or name in (".", ".."):
        raise ConfigError(
            f"experiment.name {name!r} must match [A-Za-z0-9._-]+ and not be '.' or '..'"
        )
    return name


def flatten(raw: dict, prefix: str = "") -> dict[str, Any]:
    """Nested mappings and dotted keys -> one flat dotted-key dict."""
    out: dict[str, Any] = {}
    for k, v in raw.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, f"{key}."))
        else:
            out[key] = v
    return out


def _coerce(key: str, value: Any) -> Any:
    if key not in SCHEMA:
        raise ConfigError(f"unknown config key {key!r}")
    kind, _ = SCHEMA[key]
    optional = kind.endswith("?")
    kind = kind.rstrip("?")
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{key} cannot be empty")

    def bad(expected: str) -> ConfigError:
        return ConfigError(f"{key} expects {expected}, got {value!r}")

    if kind == "bool":
        if not isinstance(value, bool):
            raise bad("true/false")
        return value
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise bad("an integer")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise bad("a number")
        return float(value)
    if kind == "str":
        if not isinstance(value, str):
            raise bad("a string")
        return value
    if kind in ("floats", "ints", "strs"):
        if not isinstance(value, (list, tuple)):
            raise bad("a list")
        items = list(value)
        for v in items:
            if kind == "strs" and not isinstance(v, str):
                raise bad("a list of strings")
            if kind != "strs" and (isinstance(v, bool) or not isinstance(v, (int, float))):
                raise bad("a list of numbers")
            if kind == "ints" and not isinstance(v, int):
                raise bad("a list of integers")
        return [float(v) for v in items] if kind == "floats" else items
    raise AssertionError(kind)


def parse_override(text: str) -> tuple[str, Any]:
    """``key=value`` with the value parsed as YAML (``0.2``, ``true``, ``[1, 2]``)."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not key=value")
    key, _, value = text.partition("=")
    key = key.strip()
    try:
        parsed = yaml.safe_load(value) if value.strip() else None
    except yaml.YAMLError as e:
        raise ConfigError(f"override {key}: unparseable value {value!r} ({e})") from e
    return key, _coerce(key, parsed)


def read_key_value_lines(path: Path) -> dict[str, Any]:
    """``key = value`` per line; ``#`` starts a comment line, blank lines are skipped."""
    out: dict[str, Any] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            key, value = parse_override(line)
        except ConfigError as e:
            raise ConfigError(f"{path}:{lineno}: {e}") from e
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_config_file(path: Path) -> dict[str, Any]:
    """YAML for ``.yaml``/``.yml`` files, ``key = value`` lines for anything else."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix.lower() not in YAML_SUFFIXES:
        return read_key_value_lines(path)
    try:
        raw = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML ({e})") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return {k: _coerce(k, v) for k, v in flatten(raw).items()}


def resolve(
    path: Optional[Path] = None,
    overrides: Sequence[str] = (),
) -> dict[str, Any]:
    """Flat, fully resolved key -> value mapping."""
    from_file = read_config_file(path) if path is not None else {}
    from_cli = dict(parse_override(o) for o in overrides)
    name = from_cli.get("dataset.name", from_file.get("dataset.name", SCHEMA["dataset.name"][1]))
    merged = {k: default for k, (_, default) in SCHEMA.items()}
    merged.update({k: _coerce(k, v) for k, v in preset_overrides(name).items()})
    merged.update(from_file)
    merged.update(from_cli)
    return merged


# ---------------------------------------------------------------------------
# Typed views
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DatasetSpec:
    source: str
    name: str
    path: Optional[Path]
    featurizer: Optional[str]
    degree_cap: int
    split: tuple[float, ...]
    motif: MotifConfig


@dataclass(frozen=True)
class ModelSpec:
    backbone: str
    num_layers: int
    hidden: int
    readout: str
    head_layers: int

    def gnn_config(self, feature_dim: int, num_classes: int) -> GnnConfig:
        return GnnConfig(
            backbone=self.backbone,
            feature_dim=feature_dim,
            num_classes=num_classes,
            num_layers=self.num_layers,
            hidden=self.hidden,
            readout=self.readout,
            head_layers=self.head_layers,
        )


@dataclass(frozen=True)
class TrainSpec:
    lr: float
    epochs: int
    batch_size: int
    corrupt_ratio: float


@dataclass(frozen=True)
class MatcherSpec:
    checkpoint: Optional[Path]
    train: bool
    num_layers: int
    hidden: int
    metric: str
    training: MatcherTrainConfig

    def model_config(self, feature_dim: int, normalizer: str) -> MatcherConfig:
        return MatcherConfig(
            feature_dim=feature_dim,
            num_layers=self.num_layers,
            hidden=self.hidden,
            metric=self.metric,
            normalizer=normalizer,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    runs: int
    seed: int
    include_vanilla: bool
    out_dir: Path
    dataset: DatasetSpec
    model: ModelSpec
    train: TrainSpec
    mixup: Optional[MixupConfig]
    matcher: MatcherSpec
    alphas: tuple[float, ...]
    raw: dict

    def mixup_for(self, alpha: float, seed: int) -> MixupConfig:
        """The configured mixup with a given alpha and stream seed."""
        assert self.mixup is not None
        return MixupConfig(
            ratio_spec=MixRatioSpec(alpha, self.mixup.ratio_spec.range_mode),
            alignment=self.mixup.alignment,
            same_class_only=self.mixup.same_class_only,
            normalizer=self.mixup.normalizer,
            seed=seed,
        )


def build_config(flat: dict[str, Any]) -> ExperimentConfig:
    c = flat
    try:
        name = validate_name(c["experiment.name"])
        if c["experiment.runs"] < 1:
            raise ConfigError("experiment.runs must be >= 1")
        if c["dataset.source"] not in VALID_SOURCES:
            raise ConfigError(f"dataset.source must be one of {VALID_SOURCES}")
        dataset_path = c["dataset.path"]
        if c["dataset.source"] == "tudataset" and dataset_path is None:
            root = tudataset_root()
            if root is None:
                raise ConfigError("dataset.path is required for tudataset sources")
            dataset_path = str(root / c["dataset.name"])
        if not 0.0 <= c["train.corrupt_ratio"] <= 1.0:
            raise ConfigError("train.corrupt_ratio must be in [0, 1]")
        for key in ("train.epochs", "train.batch_size"):
            if c[key] < 1:
                raise ConfigError(f"{key} must be >= 1")
        if len(c["motif.base_size"]) != 2:
            raise ConfigError("motif.base_size expects [min, max]")

        mixup = None
        if c["mixup.enabled"]:
            mixup = MixupConfig(
                ratio_spec=MixRatioSpec(c["mixup.alpha"], c["mixup.range"]),
                alignment=c["mixup.alignment"],
                same_class_only=c["mixup.same_class_only"],
                normalizer=c["mixup.normalizer"],
                seed=c["experiment.seed"],
            )
            if (
                mixup.alignment == "learned"
                and c["matcher.checkpoint"] is None
                and not c["matcher.train"]
            ):
                raise ConfigError(
                    "mixup.alignment=learned needs matcher.checkpoint or matcher.train=true"
                )
        alphas = tuple(c["sweep.alpha"]) if c["sweep.alpha"] else ()
        if alphas and mixup is None:
            raise ConfigError("sweep.alpha needs mixup.enabled=true")
        for a in alphas:
            MixRatioSpec(a)

        out_dir = Path(c["experiment.out_dir"]) if c["experiment.out_dir"] else runs_dir() / name
        return ExperimentConfig(
            name=name,
            runs=c["experiment.runs"],
            seed=c["experiment.seed"],
            include_vanilla=c["experiment.include_vanilla"],
            out_dir=out_dir,
            dataset=DatasetSpec(
                source=c["dataset.source"],
                name=c["dataset.name"],
                path=Path(dataset_path) if dataset_path else None,
                featurizer=c["dataset.featurizer"],
                degree_cap=c["dataset.degree_cap"],
                split=tuple(c["dataset.split"]),
                motif=MotifConfig(
                    motifs=tuple(c["motif.motifs"]),
                    bases=tuple(c["motif.bases"]),
                    base_size=tuple(c["motif.base_size"]),
                    count_per_class=c["motif.count_per_class"],
                    seed=c["motif.seed"],
                ),
            ),
            model=ModelSpec(
                backbone=c["model.backbone"],
                num_layers=c["model.num_layers"],
                hidden=c["model.hidden"],
                readout=c["model.readout"],
                head_layers=c["model.head_layers"],
            ),
            train=TrainSpec(
                lr=c["train.lr"],
                epochs=c["train.epochs"],
                batch_size=c["train.batch_size"],
                corrupt_ratio=c["train.corrupt_ratio"],
            ),
            mixup=mixup,
            matcher=MatcherSpec(
                checkpoint=Path(c["matcher.checkpoint"]) if c["matcher.checkpoint"] else None,
                train=c["matcher.train"],
                num_layers=c["matcher.num_layers"],
                hidden=c["matcher.hidden"],
                metric=c["matcher.metric"],
                training=MatcherTrainConfig(
                    margin=c["matcher.margin"],
                    lr=c["matcher.lr"],
                    epochs=c["matcher.epochs"],
                    batch_size=c["matcher.batch_size"],
                    seed=c["experiment.seed"],
                ),
            ),
            alphas=alphas,
            raw=dict(c),
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e


def load_config(
    path: Optional[Path] = None,
    overrides: Sequence[str] = (),
) -> ExperimentConfig:
    return build_config(resolve(path, overrides))


def dump_config(cfg: ExperimentConfig) -> str:
    """Resolved config as nested YAML with sorted keys (stable across runs)."""
    nested: dict = {}
    for key in sorted(cfg.raw):
        section, _, leaf = key.partition(".")
        nested.setdefault(section, {})[leaf] = cfg.raw[key]
    return yaml.safe_dump(nested, sort_keys=True, default_flow_style=False)
