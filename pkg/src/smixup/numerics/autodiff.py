"""Recorded computations, exact reverse-mode gradients, and a finite-difference check.

A :class:`ComputationRecord` pairs named leaf tensors with a function that maps
them to a scalar loss. Reverse accumulation is torch autograd; the record just
pins down which leaves count as parameters, so gradients come back keyed by
name, shaped like their parameter, and zero for leaves the loss never touches.

:func:`record_module` builds a record over an ``nn.Module``'s parameters via
``torch.func.functional_call``, so any model in this package can be checked
without touching its code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import torch
from torch import nn


@dataclass
class ComputationRecord:
    params: dict[str, torch.Tensor]
    fn: Callable[[Mapping[str, torch.Tensor]], torch.Tensor]

    def __post_init__(self):
        self.params = {
            name: p.detach().clone().to(torch.float64) for name, p in self.params.items()
        }

    def evaluate(self, params: Mapping[str, torch.Tensor] | None = None) -> torch.Tensor:
        return self.fn(self.params if params is None else params)


def record_module(
    module: nn.Module,
    loss: Callable[[Callable[..., torch.Tensor], Mapping[str, torch.Tensor]], torch.Tensor],
) -> ComputationRecord:
    """Record ``loss(module)`` as a function of the module's named parameters.

    ``loss`` receives a callable ``call(*args, **kwargs)`` that runs the module
    forward with the record's parameter values substituted in.
    """

    def fn(params: Mapping[str, torch.Tensor]) -> torch.Tensor:
        def call(*args, **kwargs):
            return torch.func.functional_call(module, dict(params), args, kwargs)

        return loss(call, params)

    return ComputationRecord(dict(module.named_parameters()), fn)


def gradients(record: ComputationRecord) -> dict[str, torch.Tensor]:
    leaves = {name: p.clone().requires_grad_(True) for name, p in record.params.items()}
    root = record.evaluate(leaves)
    if root.numel() != 1:
        raise ValueError(f"gradient root must be a scalar, got shape {tuple(root.shape)}")
    names = list(leaves)
    grads = torch.autograd.grad(
        root.reshape(()), [leaves[n] for n in names], allow_unused=True
    )
    return {
        name: torch.zeros_like(leaves[name]) if g is None else g.detach()
        for name, g in zip(names, grads)
    }


def finite_diff_check(record: ComputationRecord, eps: float = 1e-6) -> float:
    """Max relative error between autograd and central differences.

    Relative error per coordinate is |analytic - numeric| / max(1, |analytic|).
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    analytic = gradients(record)
    worst = 0.0
    with torch.no_grad():
        for name, base in record.params.items():
            flat = base.reshape(-1)
            expected = analytic[name].reshape(-1)
            for k in range(flat.numel()):
                probe = dict(record.params)
                plus = flat.clone()
                plus[k] += eps
                probe[name] = plus.reshape(base.shape)
                f_plus = float(record.evaluate(probe))
                minus = flat.clone()
                minus[k] -= eps
                probe[name] = minus.reshape(base.shape)
                f_minus = float(record.evaluate(probe))
                numeric = (f_plus - f_minus) / (2.0 * eps)
                a = float(expected[k])
                worst = max(worst, abs(a - numeric) / max(1.0, abs(a)))
    return worst
