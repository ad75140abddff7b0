"""End-to-end experiment runs: split, corrupt, train matcher, train and test classifiers.

Output directory layout::

    config.yaml     resolved configuration
    metrics.jsonl   one MetricsRecord per epoch, plus augmentation and alpha
    results.csv     final test accuracy per (condition, run)
    summary.csv     mean and sample std of results.csv per condition

Nothing time-dependent is written, so identical configs give identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from smixup import ui
from smixup.graph.motif import gen_motif_dataset
from smixup.graph.ops import corrupt_labels, featurize_unattributed, max_degree, split_dataset
from smixup.graph.tudataset import load_tudataset
from smixup.graph.types import GraphDataset
from smixup.harness.config import DatasetSpec, ExperimentConfig, dump_config
from smixup.harness.train import evaluate, train_classifier
from smixup.matcher.model import GraphMatcher, load_matcher
from smixup.matcher.train import MatcherTrainConfig, train_matcher
from smixup.mixup.core import MixupConfig, make_augmenter

SUMMARY_HEADER = (
    "experiment", "dataset", "backbone", "augmentation", "alpha", "mean_acc", "std_acc", "runs",
)
RESULTS_HEADER = ("experiment", "dataset", "backbone", "augmentation", "alpha", "run", "seed", "test_acc")


@dataclass(frozen=True)
class Condition:
    augmentation: str  # "none" or the mixup alignment
    alpha: Optional[float]
    mixup: Optional[MixupConfig]


@dataclass(frozen=True)
class SummaryRow:
    augmentation: str
    alpha: Optional[float]
    accuracies: tuple[float, ...]

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        if len(self.accuracies) < 2:
            return 0.0
        return float(np.std(self.accuracies, ddof=1))


@dataclass(frozen=True)
class ExperimentReport:
    out_dir: Path
    rows: list[SummaryRow]


def load_dataset(spec: DatasetSpec) -> GraphDataset:
    if spec.source == "motif":
        ds = gen_motif_dataset(spec.motif)
    else:
        ds = load_tudataset(spec.path, spec.name)
    if ds.feature_dim == 0:
        scheme = spec.featurizer or "constant"
        if spec.featurizer is None:
            ui.warn("dataset", f"{ds.name} has no node features; using constant features")
        cap = spec.degree_cap or max_degree(ds)
        ds = featurize_unattributed(ds, scheme, cap=cap)
    elif spec.featurizer is not None:
        ui.warn("dataset", f"{ds.name} already has node features; ignoring featurizer")
    return ds


def conditions(cfg: ExperimentConfig) -> list[Condition]:
    if cfg.mixup is None:
        return [Condition("none", None, None)]
    out = [Condition("none", None, None)] if cfg.include_vanilla else []
    for alpha in cfg.alphas or (cfg.mixup.ratio_spec.alpha,):
        out.append(Condition(cfg.mixup.alignment, alpha, cfg.mixup_for(alpha, cfg.seed)))
    return out


def _matcher_for_run(
    cfg: ExperimentConfig,
    train: GraphDataset,
    run_seed: int,
    preloaded: Optional[GraphMatcher],
    verbose: bool,
) -> GraphMatcher:
    if preloaded is not None:
        return preloaded
    training = cfg.matcher.training
    training = MatcherTrainConfig(
        margin=training.margin,
        lr=training.lr,
        epochs=training.epochs,
        batch_size=training.batch_size,
        seed=run_seed,
    )
    model_config = cfg.matcher.model_config(train.feature_dim, cfg.mixup.normalizer)
    return train_matcher(train, training, model_config, verbose=verbose)


def _alpha_cell(alpha: Optional[float]) -> str:
    return "" if alpha is None else repr(alpha)


def run_experiment(cfg: ExperimentConfig, verbose: bool = False) -> ExperimentReport:
    ds = load_dataset(cfg.dataset)
    plan = conditions(cfg)
    needs_matcher = any(c.mixup is not None and c.mixup.alignment == "learned" for c in plan)
    preloaded = None
    if needs_matcher and cfg.matcher.checkpoint is not None:
        preloaded = load_matcher(cfg.matcher.checkpoint)
        if preloaded.config.feature_dim != ds.feature_dim:
            raise ValueError(
                f"matcher checkpoint expects width {preloaded.config.feature_dim}, "
                f"dataset has {ds.feature_dim}"
            )

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.yaml").write_text(dump_config(cfg))

    accuracies: dict[int, list[float]] = {i: [] for i in range(len(plan))}
    result_rows = []
    metric_lines = []
    for run in range(cfg.runs):
        run_seed = cfg.seed + run
        train, val, test = split_dataset(ds, cfg.dataset.split, seed=run_seed)
        if cfg.train.corrupt_ratio > 0:
            train = corrupt_labels(train, cfg.train.corrupt_ratio, seed=run_seed)
        matcher = None
        if needs_matcher:
            matcher = _matcher_for_run(cfg, train, run_seed, preloaded, verbose)
        for i, cond in enumerate(plan):
            augmenter = None
            if cond.mixup is not None:
                mix_cfg = cfg.mixup_for(cond.alpha, run_seed)
                augmenter = make_augmenter(matcher, mix_cfg, seed=run_seed)
            model, records = train_classifier(
                train, val, cfg, augmenter=augmenter, test=test,
                run_index=run, seed=run_seed, verbose=verbose,
            )
            acc = evaluate(model, test).accuracy
            accuracies[i].append(acc)
            result_rows.append(
                (cfg.name, cfg.dataset.name, cfg.model.backbone, cond.augmentation,
                 _alpha_cell(cond.alpha), run, run_seed, repr(acc))
            )
            for r in records:
                line = dict(asdict(r), augmentation=cond.augmentation, alpha=cond.alpha)
                metric_lines.append(json.dumps(line, sort_keys=True))
            ui.note("run", f"run {run} {cond.augmentation} alpha={_alpha_cell(cond.alpha) or '-'} "
                    f"test_acc={acc:.4f}")

    summary = [
        SummaryRow(cond.augmentation, cond.alpha, tuple(accuracies[i]))
        for i, cond in enumerate(plan)
    ]
    (out_dir / "metrics.jsonl").write_text("\n".join(metric_lines) + "\n")
    with open(out_dir / "results.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(RESULTS_HEADER)
        w.writerows(result_rows)
    with open(out_dir / "summary.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for row in summary:
            w.writerow(
                (cfg.name, cfg.dataset.name, cfg.model.backbone, row.augmentation,
                 _alpha_cell(row.alpha), repr(row.mean), repr(row.std), len(row.accuracies))
            )
    return ExperimentReport(out_dir, summary)
