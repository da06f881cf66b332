"""Deterministic identifier allocation.

Identifiers are opaque prefixed counters ("blk-000007") rather than UUIDs so
that a scripted run produces byte-identical project files across repeats. The
counters persist inside the project document, so a reloaded project keeps
allocating without collisions.
"""

from __future__ import annotations

import threading


class IdAllocator:
    """Thread-safe per-prefix counter. `next("blk")` -> "blk-000001"."""

    def __init__(self, counters: dict[str, int] | None = None):
        self._lock = threading.Lock()
        self._counters: dict[str, int] = dict(counters or {})

    def next(self, prefix: str) -> str:
        with self._lock:
            value = self._counters.get(prefix, 0) + 1
            self._counters[prefix] = value
        return f"{prefix}-{value:06d}"

    def to_dict(self) -> dict[str, int]:
        with self._lock:
            return dict(self._counters)

    @classmethod
    def from_dict(cls, data: dict[str, int]) -> "IdAllocator":
        return cls({str(k): int(v) for k, v in data.items()})
