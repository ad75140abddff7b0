"""Terminal output for the smixup commands: role-named colors, headers, progress lines."""

import sys
from typing import Callable, Sequence

import numpy as np

from smixup.config import is_quiet

RESET = "\x1b[0m"


def _sgr(code: str) -> Callable[[object], str]:
    return lambda x: f"\x1b[{code}m{x}{RESET}"


# roles, not colors: callers say what a line means
error_text = _sgr("31")
written_text = _sgr("32")
summary_text = _sgr("36")
caution_text = _sgr("33")
heading_text = _sgr("1")
hint_text = _sgr("2")
alarm_text = _sgr("1;33")

HEADER_WIDTH = 48
HEADER_RULE = "─"


def section_header(title: str, width: int = HEADER_WIDTH) -> str:
    """``smixup · <title> ───`` padded to ``width`` visible characters."""
    prefix = f"smixup · {title} "
    return heading_text(prefix + HEADER_RULE * max(0, width - len(prefix)))


def warn_banner(text: str, tag: str = "bound") -> str:
    """Alarm line for a result that breaks an expected property: ``[bound] 3 rows exceed ...``."""
    return alarm_text(f"[{tag}] {text}")


def note(tag: str, msg: str) -> None:
    """Dim progress line on stderr: ``  [tag] msg``. Silenced by SMIXUP_QUIET."""
    if is_quiet():
        return
    print(hint_text(f"  [{tag}] {msg}"), file=sys.stderr)


def warn(tag: str, msg: str) -> None:
    if is_quiet():
        return
    print(caution_text(f"  [{tag}] warn: {msg}"), file=sys.stderr)


def format_mean_std(values: Sequence[float], scale: float = 100.0) -> str:
    """``72.80 ± 4.08`` style cell (sample std; 0 for a single value)."""
    arr = np.asarray(values, dtype=float) * scale
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return f"{float(arr.mean()):.2f} ± {std:.2f}"
