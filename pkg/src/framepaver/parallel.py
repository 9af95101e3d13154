"""Worker-count policy for the embarrassingly parallel checks."""

from __future__ import annotations

import os

ENV_VAR = "FRAMEPAVER_THREADS"


def thread_cap() -> int:
    """Worker cap: FRAMEPAVER_THREADS if set and sane, else machine cores."""
    raw = os.environ.get(ENV_VAR)
    if raw is not None:
        try:
            return max(1, int(raw))
        except ValueError:
            pass  # unreadable setting falls back to the default
    return os.cpu_count() or 1
