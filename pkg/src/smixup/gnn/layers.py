"""Functional message-passing layers on dense weighted adjacency.

Adjacency never stores self-loops; GCN adds them here (A + I). Weighted
degrees are used as-is, so the symmetric normalization reduces to the classic
formula on 0/1 graphs and stays well defined on mixed, fully connected ones.
"""

from __future__ import annotations

import torch

from smixup.config import LOG_CLAMP

VALID_READOUTS = ("mean", "sum")


def _check_symmetric(a: torch.Tensor) -> None:
    if a.shape[0] != a.shape[1] or not torch.equal(a, a.T):
        raise ValueError("adjacency must be a symmetric square matrix")


def gcn_layer(
    h: torch.Tensor,
    a: torch.Tensor,
    weight: torch.Tensor,
    bias: torch.Tensor | None = None,
) -> torch.Tensor:
    """relu(D^-1/2 (A + I) D^-1/2 H W + b) with D the row sums of A + I."""
    _check_symmetric(a)
    a_hat = a + torch.eye(a.shape[0], dtype=a.dtype)
    d_inv_sqrt = a_hat.sum(dim=1).pow(-0.5)
    a_norm = d_inv_sqrt[:, None] * a_hat * d_inv_sqrt[None, :]
    out = a_norm @ (h @ weight)
    if bias is not None:
        out = out + bias
    return torch.relu(out)


def gin_layer(
    h: torch.Tensor,
    a: torch.Tensor,
    mlp: tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor],
    eps: float = 0.0,
) -> torch.Tensor:
    """MLP((1 + eps) H + A H) with a rectifier between the two MLP layers.

    ``mlp`` is (W1, b1, W2, b2) with W1: p x q, W2: q x q.
    """
    _check_symmetric(a)
    w1, b1, w2, b2 = mlp
    z = (1.0 + eps) * h + a @ h
    return torch.relu(z @ w1 + b1) @ w2 + b2


def readout(h: torch.Tensor, mode: str = "mean") -> torch.Tensor:
    if h.shape[0] == 0:
        raise ValueError("readout of an empty graph")
    if mode == "mean":
        return h.mean(dim=0)
    if mode == "sum":
        return h.sum(dim=0)
    raise ValueError(f"unknown readout {mode!r}; expected one of {VALID_READOUTS}")


def pooling_matrix(sizes: list[int], mode: str, dtype=torch.float64) -> torch.Tensor:
    """B x N matrix whose rows pool each block of a block-diagonal batch."""
    if mode not in VALID_READOUTS:
        raise ValueError(f"unknown readout {mode!r}; expected one of {VALID_READOUTS}")
    pool = torch.zeros(len(sizes), sum(sizes), dtype=dtype)
    start = 0
    for i, n in enumerate(sizes):
        if n == 0:
            raise ValueError("readout of an empty graph")
        pool[i, start : start + n] = 1.0 / n if mode == "mean" else 1.0
        start += n
    return pool


def soft_cross_entropy(p: torch.Tensor, y: torch.Tensor) -> torch.Tensor:
    """-sum_c y_c log(max(p_c, 1e-12)), over the last axis."""
    return -(y * torch.log(torch.clamp(p, min=LOG_CLAMP))).sum(dim=-1)
