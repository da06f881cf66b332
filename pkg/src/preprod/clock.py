"""Clock abstraction: wall clock for live use, tick clock for reproducible runs.

All timestamps in the engine are UTC truncated to millisecond resolution.
"""

from __future__ import annotations

import threading
from datetime import datetime, timedelta, timezone


def truncate_ms(dt: datetime) -> datetime:
    """Drop sub-millisecond precision and force UTC."""
    dt = dt.astimezone(timezone.utc) if dt.tzinfo else dt.replace(tzinfo=timezone.utc)
    return dt.replace(microsecond=(dt.microsecond // 1000) * 1000)


class SystemClock:
    def now(self) -> datetime:
        return truncate_ms(datetime.now(timezone.utc))


class TickClock:
    """Deterministic clock: starts at a fixed instant, advances a fixed step per call."""

    def __init__(self, start: datetime | None = None, step_ms: int = 1):
        self._lock = threading.Lock()
        base = start or datetime(2030, 1, 1, tzinfo=timezone.utc)
        self._current = truncate_ms(base)
        self._step = timedelta(milliseconds=step_ms)

    def now(self) -> datetime:
        with self._lock:
            value = self._current
            self._current = self._current + self._step
        return value
