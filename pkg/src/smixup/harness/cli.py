"""smixup - graph mixup by learned soft alignments.

Subcommands:

    smixup motif-gen --out DIR                      # synthetic MOTIF dataset (TUDataset files)
    smixup train-matcher -c exp.yaml --out M.pt     # triplet-train the matching network
    smixup augment -c exp.yaml --matcher M.pt --out mixed.txt
    smixup train-classifier -c exp.yaml --out C.pt  # one run, optional mixup
    smixup eval --model C.pt -c exp.yaml            # accuracy / loss / ROC-AUC on a split
    smixup run -c exp.yaml -s experiment.runs=10    # full experiment -> summary.csv
    smixup ged-verify --pairs 500 --cost norm       # normalized GED vs lambda sweep
    smixup presets                                  # per-dataset hyperparameters

Every command that reads an experiment takes ``--config PATH`` (key = value or YAML) and any
number of ``--set key=value`` overrides, applied in that order. Set
SMIXUP_HOME to relocate the default output root (default ~/.smixup).
"""

import csv
from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional

import numpy as np
import typer
from tabulate import tabulate

from smixup.ged.bound import LAMBDA_GRID, VALID_MODES, verify_bound
from smixup.ged.distance import VALID_FEATURE_COSTS, EditCostModel, GedUndefinedError
from smixup.gnn.checkpoint import CheckpointError
from smixup.gnn.model import load_classifier, save_classifier
from smixup.graph.motif import MotifConfig, gen_motif_dataset
from smixup.graph.ops import corrupt_labels, split_dataset
from smixup.graph.tudataset import DatasetFormatError, write_tudataset
from smixup.harness.config import ConfigError, ExperimentConfig, load_config
from smixup.harness.experiment import load_dataset, run_experiment
from smixup.harness.presets import ALPHA_GRID, PRESET_MAP
from smixup.harness.train import evaluate, train_classifier
from smixup.matcher.model import GraphMatcher, load_matcher, save_matcher
from smixup.matcher.train import train_matcher
from smixup.mixup.core import batch_mixup, make_augmenter
from smixup.mixup.dump import write_graph_dump
from smixup.ui import (
    error_text,
    format_mean_std,
    heading_text,
    hint_text,
    section_header,
    summary_text,
    warn_banner,
    written_text,
)

app = typer.Typer(
    help="Graph mixup by learned soft alignments.",
    add_completion=False,
    no_args_is_help=True,
)

CONFIG_OPTION = typer.Option(None, "--config", "-c", help="Experiment config (key = value lines, or .yaml).")
SET_OPTION = typer.Option(
    None, "--set", "-s", help="Override a config key: key=value (repeatable)."
)
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Per-epoch progress on stderr.")


# --- helpers ---


@contextmanager
def _guard():
    """Turn expected failures into a red error line and exit code 2."""
    try:
        yield
    except (
        ConfigError,
        DatasetFormatError,
        CheckpointError,
        GedUndefinedError,
        ValueError,
        FileNotFoundError,
    ) as e:
        typer.echo(error_text(f"Error: {e}"), err=True)
        raise typer.Exit(2)


def _load(config: Optional[Path], sets: Optional[List[str]]) -> ExperimentConfig:
    return load_config(config, sets or [])


def _first_split(cfg: ExperimentConfig):
    ds = load_dataset(cfg.dataset)
    train, val, test = split_dataset(ds, cfg.dataset.split, seed=cfg.seed)
    if cfg.train.corrupt_ratio > 0:
        train = corrupt_labels(train, cfg.train.corrupt_ratio, seed=cfg.seed)
    return train, val, test


def _matcher(cfg: ExperimentConfig, path: Optional[Path], feature_dim: int) -> Optional[GraphMatcher]:
    if cfg.mixup is None or cfg.mixup.alignment != "learned":
        return None
    path = path or cfg.matcher.checkpoint
    if path is None:
        raise ConfigError("learned alignment needs --matcher PATH or matcher.checkpoint")
    matcher = load_matcher(path)
    if matcher.config.feature_dim != feature_dim:
        raise ValueError(
            f"matcher expects feature width {matcher.config.feature_dim}, dataset has {feature_dim}"
        )
    return matcher


def _fmt(x: Optional[float]) -> str:
    return "-" if x is None else f"{x:.4f}"


# --- motif-gen ---


@app.command("motif-gen")
def motif_gen(
    out: Path = typer.Option(..., "--out", "-o", help="Directory for the TUDataset files."),
    count_per_class: int = typer.Option(500, "--count-per-class", min=1),
    base_min: int = typer.Option(6, "--base-min", min=4),
    base_max: int = typer.Option(12, "--base-max", min=4),
    seed: int = typer.Option(0, "--seed"),
):
    """Generate the synthetic MOTIF dataset (base graph + class motif)."""
    with _guard():
        ds = gen_motif_dataset(
            MotifConfig(base_size=(base_min, base_max), count_per_class=count_per_class, seed=seed)
        )
        write_tudataset(ds, out, "MOTIF")
    typer.echo(written_text(f"Wrote: {out} ({len(ds)} graphs, {ds.num_classes} classes)"))


# --- train-matcher ---


@app.command("train-matcher")
def train_matcher_cmd(
    out: Path = typer.Option(..., "--out", "-o", help="Matcher checkpoint path."),
    config: Optional[Path] = CONFIG_OPTION,
    sets: Optional[List[str]] = SET_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Train the graph matching network on the training split."""
    with _guard():
        cfg = _load(config, sets)
        train, _, _ = _first_split(cfg)
        normalizer = cfg.mixup.normalizer if cfg.mixup else "softmax"
        losses: list[float] = []
        matcher = train_matcher(
            train,
            cfg.matcher.training,
            cfg.matcher.model_config(train.feature_dim, normalizer),
            on_step=lambda _, loss: losses.append(loss),
            verbose=verbose,
        )
        save_matcher(out, matcher)
    k = max(1, len(losses) // 10)
    typer.echo(
        summary_text(f"Triplet loss: first 10% {np.mean(losses[:k]):.4f} -> last 10% {np.mean(losses[-k:]):.4f}")
    )
    typer.echo(written_text(f"Wrote: {out}"))


# --- augment ---


@app.command("augment")
def augment(
    out: Path = typer.Option(..., "--out", "-o", help="Graph dump output path."),
    matcher_path: Optional[Path] = typer.Option(None, "--matcher", "-m", help="Matcher checkpoint."),
    config: Optional[Path] = CONFIG_OPTION,
    sets: Optional[List[str]] = SET_OPTION,
    limit: int = typer.Option(0, "--limit", min=0, help="Mix only the first N training graphs (0 = all)."),
):
    """Mix the training split batch by batch and dump the mixed graphs."""
    with _guard():
        cfg = _load(config, sets)
        if cfg.mixup is None:
            raise ConfigError("augment needs mixup.enabled=true")
        train, _, _ = _first_split(cfg)
        matcher = _matcher(cfg, matcher_path, train.feature_dim)
        graphs = list(train.graphs[:limit] if limit else train.graphs)
        rng = np.random.default_rng(cfg.seed)
        mixed = []
        for start in range(0, len(graphs), cfg.train.batch_size):
            mixed.extend(batch_mixup(graphs[start : start + cfg.train.batch_size], matcher, cfg.mixup, rng))
        write_graph_dump(mixed, out)
    typer.echo(written_text(f"Wrote: {out} ({len(mixed)} mixed graphs)"))


# --- train-classifier ---


@app.command("train-classifier")
def train_classifier_cmd(
    out: Path = typer.Option(..., "--out", "-o", help="Classifier checkpoint path."),
    matcher_path: Optional[Path] = typer.Option(None, "--matcher", "-m", help="Matcher checkpoint."),
    config: Optional[Path] = CONFIG_OPTION,
    sets: Optional[List[str]] = SET_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Train one classifier (first split), optionally with mixup."""
    with _guard():
        cfg = _load(config, sets)
        train, val, test = _first_split(cfg)
        augmenter = None
        if cfg.mixup is not None:
            matcher = _matcher(cfg, matcher_path, train.feature_dim)
            augmenter = make_augmenter(matcher, cfg.mixup, seed=cfg.seed)
        model, records = train_classifier(
            train, val, cfg, augmenter=augmenter, test=test, verbose=verbose
        )
        save_classifier(out, model)
        result = evaluate(model, test)
    best = max(records, key=lambda r: r.val_acc)
    typer.echo(section_header("Classifier"))
    typer.echo(f"  best epoch     {best.epoch}  (val acc {best.val_acc:.4f})")
    typer.echo(f"  test accuracy  {result.accuracy:.4f}")
    typer.echo(f"  test loss      {result.loss:.4f}")
    typer.echo(f"  test ROC-AUC   {_fmt(result.roc_auc)}")
    typer.echo(written_text(f"Wrote: {out}"))


# --- eval ---


@app.command("eval")
def eval_cmd(
    model_path: Path = typer.Option(..., "--model", help="Classifier checkpoint."),
    config: Optional[Path] = CONFIG_OPTION,
    sets: Optional[List[str]] = SET_OPTION,
    split: str = typer.Option("test", "--split", help="train, val, test or all."),
):
    """Evaluate a classifier checkpoint on one split of the configured dataset."""
    with _guard():
        cfg = _load(config, sets)
        model = load_classifier(model_path)
        if split == "all":
            target = load_dataset(cfg.dataset)
        elif split in ("train", "val", "test"):
            target = dict(zip(("train", "val", "test"), _first_split(cfg)))[split]
        else:
            raise ValueError(f"--split must be train, val, test or all, got {split!r}")
        result = evaluate(model, target)
    typer.echo(
        tabulate(
            [[target.name, len(target), f"{result.accuracy:.4f}", f"{result.loss:.4f}", _fmt(result.roc_auc)]],
            headers=["split", "graphs", "accuracy", "loss", "roc_auc"],
            tablefmt="github",
        )
    )


# --- run ---


@app.command("run")
def run_cmd(
    config: Optional[Path] = CONFIG_OPTION,
    sets: Optional[List[str]] = SET_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Run a full experiment and write metrics.jsonl, results.csv, summary.csv."""
    with _guard():
        cfg = _load(config, sets)
        typer.echo(summary_text(f"Experiment {cfg.name}: {cfg.dataset.name}, {cfg.model.backbone}, {cfg.runs} runs"))
        report = run_experiment(cfg, verbose=verbose)
    rows = [
        [r.augmentation, "-" if r.alpha is None else r.alpha,
         format_mean_std(r.accuracies), len(r.accuracies)]
        for r in report.rows
    ]
    typer.echo(tabulate(rows, headers=["augmentation", "alpha", "accuracy (%)", "runs"], tablefmt="fancy_grid"))
    typer.echo(written_text(f"Wrote: {report.out_dir}"))


# --- ged-verify ---


@app.command("ged-verify")
def ged_verify(
    pairs: int = typer.Option(500, "--pairs", min=1),
    mode: str = typer.Option("aligned-chain", "--mode", help=f"One of {', '.join(VALID_MODES)}."),
    cost: str = typer.Option("norm", "--cost", help=f"Node cost: {', '.join(VALID_FEATURE_COSTS)}."),
    max_nodes: int = typer.Option(6, "--max-nodes", min=1, max=8),
    seed: int = typer.Option(0, "--seed"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV of (pair, lambda, eps, bound, gap)."),
):
    """Sweep random tiny pairs over a lambda grid; compare normalized GED with lambda."""
    with _guard():
        sweep = verify_bound(
            pairs=pairs,
            lambdas=LAMBDA_GRID,
            mode=mode,
            cost=EditCostModel(cost),
            max_nodes=max_nodes,
            seed=seed,
        )
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(("pair", "lambda", "epsilon", "bound", "gap", "mode", "cost"))
            for r in sweep.rows:
                w.writerow((r.pair, repr(r.lam), repr(r.epsilon), repr(r.bound), repr(r.gap), r.mode, r.cost))
        typer.echo(written_text(f"Wrote: {out}"))
    rho = np.array([c for c in sweep.rank_correlations if not np.isnan(c)])
    typer.echo(section_header("ged-verify"))
    typer.echo(f"  pairs checked    {pairs - sweep.skipped}  (skipped {sweep.skipped})")
    typer.echo(f"  rows             {len(sweep.rows)}")
    typer.echo(f"  bound violations {sweep.violations}")
    if rho.size:
        typer.echo(f"  rank corr        min {rho.min():.3f}  mean {rho.mean():.3f}")
    if sweep.violations:
        typer.echo(warn_banner(f"{sweep.violations} rows exceed the bound ({mode}, {cost} cost)"))


# --- presets ---


@app.command("presets")
def presets():
    """Show per-dataset classifier and matcher hyperparameters."""
    rows = [
        [name, p.lr, p.epochs, p.batch_size, p.matcher_layers, p.matcher_batch_size, p.featurizer or "-"]
        for name, p in PRESET_MAP.items()
    ]
    typer.echo(heading_text("Dataset presets"))
    typer.echo(
        tabulate(
            rows,
            headers=["dataset", "lr", "epochs", "batch", "matcher layers", "matcher batch", "featurizer"],
            tablefmt="fancy_grid",
        )
    )
    typer.echo(hint_text("Applied automatically when dataset.name matches; config and --set win."))
    typer.echo(hint_text(f"Alpha grid for sweep.alpha: {list(ALPHA_GRID)}"))


if __name__ == "__main__":
    app()
