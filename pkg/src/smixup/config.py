"""Centralized configuration: env vars, storage paths, and shared constants.

Experiment-level settings (datasets, models, mixup knobs) live in
``smixup.harness.config``; this module only owns process-wide paths and the
numeric constants several subpackages agree on.
"""

from __future__ import annotations

import os
from pathlib import Path

# storage

SMIXUP_HOME_ENV = "SMIXUP_HOME"
QUIET_ENV = "SMIXUP_QUIET"
TUDATASET_ROOT_ENV = "SMIXUP_TUDATASET_ROOT"


def smixup_home() -> Path:
    override = os.environ.get(SMIXUP_HOME_ENV)
    if override:
        return Path(override).expanduser().resolve()
    return Path.home() / ".smixup"


def runs_dir() -> Path:
    """Default root for experiment outputs (``$SMIXUP_HOME/runs``)."""
    d = smixup_home() / "runs"
    d.mkdir(parents=True, exist_ok=True)
    return d


def tudataset_root() -> Path | None:
    """Directory holding raw TUDataset folders, if the user configured one."""
    root = os.environ.get(TUDATASET_ROOT_ENV)
    return Path(root).expanduser() if root else None


def is_quiet() -> bool:
    return bool(os.environ.get(QUIET_ENV))


# numerics

DEFAULT_SEED = 0

# log(p) is evaluated at max(p, LOG_CLAMP) so confident mistakes stay finite.
LOG_CLAMP = 1e-12

SINKHORN_MAX_ITERS = 50
SINKHORN_TOL = 1e-6

# exact GED enumerates partial injections; beyond this it is not an oracle.
GED_NODE_LIMIT = 8
