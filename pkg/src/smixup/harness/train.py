"""Classifier training with optional mixup, and evaluation."""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import torch
from sklearn.metrics import roc_auc_score

from smixup import ui
from smixup.gnn.layers import soft_cross_entropy
from smixup.gnn.model import GnnClassifier, batch_tensors, label_tensor, predict_proba
from smixup.graph.types import Graph, GraphDataset
from smixup.harness.config import ExperimentConfig

Augmenter = Callable[[Sequence[Graph]], list]


@dataclass(frozen=True)
class MetricsRecord:
    run: int
    epoch: int
    train_loss: float
    val_acc: float
    test_loss: Optional[float] = None
    test_acc: Optional[float] = None
    test_auc: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    loss: float
    roc_auc: Optional[float] = None


def score_predictions(probs: np.ndarray, labels: np.ndarray) -> EvalResult:
    """Accuracy, mean soft cross-entropy and (binary only) ROC-AUC.

    ``labels`` are label distributions, one row per graph.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if probs.shape[0] == 0:
        raise ValueError("cannot score an empty prediction set")
    truth = labels.argmax(axis=1)
    accuracy = float((probs.argmax(axis=1) == truth).mean())
    loss = float(soft_cross_entropy(torch.from_numpy(probs), torch.from_numpy(labels)).mean())
    auc = None
    if probs.shape[1] == 2 and len(np.unique(truth)) == 2:
        auc = float(roc_auc_score(truth, probs[:, 1]))
    return EvalResult(accuracy, loss, auc)


def evaluate(model: GnnClassifier, test: GraphDataset) -> EvalResult:
    if len(test) == 0:
        raise ValueError("empty evaluation set")
    probs = predict_proba(model, list(test.graphs))
    return score_predictions(probs, np.stack([g.label for g in test.graphs]))


def train_classifier(
    train: GraphDataset,
    val: GraphDataset,
    cfg: ExperimentConfig,
    augmenter: Optional[Augmenter] = None,
    test: Optional[GraphDataset] = None,
    run_index: int = 0,
    seed: Optional[int] = None,
    verbose: bool = False,
) -> tuple[GnnClassifier, list[MetricsRecord]]:
    """Adam on soft cross-entropy; returns the weights with the best validation accuracy.

    With an augmenter every mini-batch is replaced by its mixed counterpart
    before the loss. Validation and test splits are only ever read.
    """
    if len(train) == 0:
        raise ValueError("empty training set")
    if train.feature_dim != val.feature_dim or train.num_classes != val.num_classes:
        raise ValueError("train and validation splits disagree on feature width or classes")
    seed = cfg.seed if seed is None else seed
    model = GnnClassifier(cfg.model.gnn_config(train.feature_dim, train.num_classes), seed=seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.train.lr, betas=(0.9, 0.999))
    rng = np.random.default_rng(seed)
    batch_size = cfg.train.batch_size

    records: list[MetricsRecord] = []
    best_acc, best_state = -1.0, None
    for epoch in range(cfg.train.epochs):
        model.train()
        order = rng.permutation(len(train))
        total, seen = 0.0, 0
        for start in range(0, len(order), batch_size):
            batch = [train[int(i)] for i in order[start : start + batch_size]]
            if augmenter is not None:
                batch = augmenter(batch)
            a, x, sizes = batch_tensors(batch)
            probs = model(a, x, sizes)
            loss = soft_cross_entropy(probs, label_tensor(batch)).mean()
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(batch)
            seen += len(batch)
        model.eval()
        val_acc = evaluate(model, val).accuracy
        if val_acc > best_acc:
            best_acc, best_state = val_acc, copy.deepcopy(model.state_dict())
        tested = evaluate(model, test) if test is not None else None
        records.append(
            MetricsRecord(
                run=run_index,
                epoch=epoch,
                train_loss=total / seen,
                val_acc=val_acc,
                test_loss=tested.loss if tested else None,
                test_acc=tested.accuracy if tested else None,
                test_auc=tested.roc_auc if tested else None,
            )
        )
        if verbose:
            ui.note("train", f"run {run_index} epoch {epoch + 1}/{cfg.train.epochs} "
                    f"loss {total / seen:.4f} val {val_acc:.3f}")
    model.load_state_dict(best_state)
    return model, records
