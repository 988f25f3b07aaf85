"""Internal parallelism cap, controlled by the CRCALC_THREADS env var."""

from __future__ import annotations

import os

ENV_VAR = "CRCALC_THREADS"


def thread_count() -> int:
    """Worker count for internal parallel loops.

    Defaults to the machine's core count; the ``CRCALC_THREADS``
    environment variable caps it.  Results never depend on the value,
    parallel loops keep a fixed reduction order.
    """
    raw = os.environ.get(ENV_VAR)
    if raw is None or not raw.strip():
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return value
