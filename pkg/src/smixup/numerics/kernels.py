"""Dense kernels shared by the matcher and the mixup pipeline.

Everything here is float64 torch and differentiable, so the same code path
serves training (autograd) and inference (``torch.no_grad``).
"""

from __future__ import annotations

import torch

from smixup.config import SINKHORN_MAX_ITERS, SINKHORN_TOL

VALID_METRICS = ("cosine", "neg-sq-euclidean")
VALID_NORMALIZERS = ("softmax", "sinkhorn")


def as_tensor(x) -> torch.Tensor:
    if isinstance(x, torch.Tensor):
        return x.to(torch.float64)
    return torch.as_tensor(x, dtype=torch.float64)


def column_softmax(scores: torch.Tensor) -> torch.Tensor:
    """Softmax down each column (every column sums to 1)."""
    scores = as_tensor(scores)
    return torch.softmax(scores, dim=0)


def sinkhorn_normalize(
    scores: torch.Tensor,
    max_iters: int = SINKHORN_MAX_ITERS,
    tol: float = SINKHORN_TOL,
) -> torch.Tensor:
    """Alternate column/row scaling of exp(scores).

    Target: columns sum to 1 and rows sum to cols/rows, so the total mass
    matches a column-stochastic matrix and the result can replace
    :func:`column_softmax` anywhere. The column pass always runs last.
    """
    scores = as_tensor(scores)
    if not torch.isfinite(scores).all():
        raise ValueError("sinkhorn_normalize: non-finite scores")
    rows, cols = scores.shape
    target = cols / rows
    p = torch.exp(scores - scores.max())
    for _ in range(max_iters):
        p = p / p.sum(dim=0, keepdim=True)
        if (p.sum(dim=1) - target).abs().max() < tol:
            return p
        p = p * (target / p.sum(dim=1, keepdim=True))
    return p / p.sum(dim=0, keepdim=True)


def normalize_scores(scores: torch.Tensor, normalizer: str) -> torch.Tensor:
    if normalizer == "softmax":
        return column_softmax(scores)
    if normalizer == "sinkhorn":
        return sinkhorn_normalize(scores)
    raise ValueError(f"unknown normalizer {normalizer!r}; expected one of {VALID_NORMALIZERS}")


def pairwise_similarity(h1: torch.Tensor, h2: torch.Tensor, metric: str) -> torch.Tensor:
    """n1 x n2 similarity between the rows of ``h1`` and ``h2``.

    cosine: zero rows have similarity 0 with everything.
    neg-sq-euclidean: -||a - b||^2.
    """
    h1, h2 = as_tensor(h1), as_tensor(h2)
    if h1.shape[-1] != h2.shape[-1]:
        raise ValueError(f"embedding widths differ: {h1.shape[-1]} vs {h2.shape[-1]}")
    dots = h1 @ h2.T
    if metric == "cosine":
        norms = h1.norm(dim=1, keepdim=True) * h2.norm(dim=1, keepdim=True).T
        safe = torch.where(norms > 0, norms, torch.ones_like(norms))
        return torch.where(norms > 0, dots / safe, torch.zeros_like(dots))
    if metric == "neg-sq-euclidean":
        sq1 = (h1 * h1).sum(dim=1, keepdim=True)
        sq2 = (h2 * h2).sum(dim=1, keepdim=True).T
        return -(sq1 + sq2 - 2.0 * dots)
    raise ValueError(f"unknown metric {metric!r}; expected one of {VALID_METRICS}")


def vector_similarity(a: torch.Tensor, b: torch.Tensor, metric: str) -> torch.Tensor:
    """Scalar similarity between two vectors (or row-wise for two stacks)."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim == 1:
        return pairwise_similarity(a[None], b[None], metric)[0, 0]
    if metric == "cosine":
        norms = a.norm(dim=1) * b.norm(dim=1)
        dots = (a * b).sum(dim=1)
        safe = torch.where(norms > 0, norms, torch.ones_like(norms))
        return torch.where(norms > 0, dots / safe, torch.zeros_like(dots))
    if metric == "neg-sq-euclidean":
        return -((a - b) ** 2).sum(dim=1)
    raise ValueError(f"unknown metric {metric!r}; expected one of {VALID_METRICS}")
