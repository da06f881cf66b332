"""Project image assets.

Assets live in memory while a session runs (so rollback is a dict restore) and
are materialized to the project's sibling asset directory on save. Blocks and
context payloads store only the opaque ref (the file name).
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

from .errors import AssetWriteFailureError, UnknownAssetError


class AssetStore:
    def __init__(self, assets: dict[str, bytes] | None = None):
        self._assets: dict[str, bytes] = dict(assets or {})

    def put(self, name: str, data: bytes) -> str:
        """Store bytes under `name`; returns the ref. Overwrite-safe (same name,
        same content is a no-op; differing content is rejected)."""
        existing = self._assets.get(name)
        if existing is not None and existing != data:
            raise AssetWriteFailureError(f"asset {name} already exists with different content")
        self._assets[name] = data
        return name

    def get(self, ref: str) -> bytes:
        try:
            return self._assets[ref]
        except KeyError:
            raise UnknownAssetError(f"no asset stored under ref {ref!r}") from None

    def exists(self, ref: str) -> bool:
        return ref in self._assets

    def refs(self) -> list[str]:
        return sorted(self._assets)

    def snapshot(self) -> dict[str, bytes]:
        return dict(self._assets)

    def restore(self, snap: dict[str, bytes]) -> None:
        self._assets = dict(snap)

    def write_to(self, directory: Path) -> None:
        """Make the directory hold exactly this store's assets.

        The directory is owned by the project file it sits next to, so
        stale files from an earlier save are removed rather than kept.
        """
        directory.mkdir(parents=True, exist_ok=True)
        current = set(self.refs())
        for entry in directory.iterdir():
            if entry.is_file() and entry.name not in current:
                entry.unlink()
        for name in self.refs():
            (directory / name).write_bytes(self._assets[name])

    @classmethod
    def read_from(cls, directory: Path) -> "AssetStore":
        store = cls()
        if directory.is_dir():
            for entry in sorted(directory.iterdir()):
                if entry.is_file():
                    store._assets[entry.name] = entry.read_bytes()
        return store


def placeholder_png(digest: bytes, size: int = 16) -> bytes:
    """Tiny deterministic PNG whose pixels tile the given digest bytes.

    Hand-rolled so the byte stream depends only on the digest: fixed zlib
    level, no ancillary chunks, no timestamps.
    """

    def chunk(tag: bytes, payload: bytes) -> bytes:
        raw = tag + payload
        return struct.pack(">I", len(payload)) + raw + struct.pack(">I", zlib.crc32(raw))

    rows = []
    for y in range(size):
        row = bytearray([0])  # filter type 0
        for x in range(size):
            i = (y * size + x) * 3
            row.extend(digest[(i + c) % len(digest)] for c in range(3))
        rows.append(bytes(row))
    ihdr = struct.pack(">IIBBBBB", size, size, 8, 2, 0, 0, 0)  # 8-bit RGB
    idat = zlib.compress(b"".join(rows), 9)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", idat)
        + chunk(b"IEND", b"")
    )
