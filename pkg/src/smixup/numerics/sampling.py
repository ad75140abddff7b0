"""Mixing-ratio sampling: lambda' ~ Beta(alpha, alpha), optionally folded to [0.5, 1]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VALID_RANGES = ("half", "full")


@dataclass(frozen=True)
class MixRatioSpec:
    alpha: float = 0.2
    range_mode: str = "half"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.range_mode not in VALID_RANGES:
            raise ValueError(f"range must be one of {VALID_RANGES}, got {self.range_mode!r}")


def beta_from_gammas(g1: float, g2: float) -> float:
    return g1 / (g1 + g2)


def fold(lam: float, range_mode: str) -> float:
    """half -> max(lam, 1 - lam); full -> lam unchanged."""
    return max(lam, 1.0 - lam) if range_mode == "half" else lam


def sample_mix_ratio(spec: MixRatioSpec, rng: np.random.Generator) -> float:
    # numpy's standard_gamma is Marsaglia-Tsang (with the alpha < 1 boost).
    g1, g2 = rng.standard_gamma(spec.alpha, size=2)
    if g1 + g2 == 0.0:
        # both draws underflow for tiny alpha; the limit is a fair coin flip
        lam = float(rng.integers(2))
    else:
        lam = beta_from_gammas(float(g1), float(g2))
    return fold(lam, spec.range_mode)
