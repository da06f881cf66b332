"""Agent memory: short-term context windows plus the core agent's long-term
chunked transcript with similarity retrieval.

Older transcript entries are grouped into fixed-size, time-ordered chunks,
each with a summary and an embedding; retrieval is an exhaustive cosine scan
(projects are small; approximate indexing is deliberately out of scope). The
default embedder is a deterministic token-hash bag of words so scripted runs
are reproducible; live summarization/expansion route through the lightweight
provider tier.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .model import AgentRole, ts_from_wire, ts_to_wire

EMBEDDING_DIM = 256
_TOKEN_RE = re.compile(r"[a-z0-9']+")


class EntryKind(str, Enum):
    MESSAGE = "message"
    TOOL_CALL = "tool-call"
    INTER_AGENT = "inter-agent"
    OUTPUT = "output"


@dataclass(frozen=True)
class WindowEntry:
    kind: EntryKind
    text: str
    timestamp: datetime

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "text": self.text,
            "timestamp": ts_to_wire(self.timestamp),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "WindowEntry":
        return cls(
            kind=EntryKind(data["kind"]),
            text=data["text"],
            timestamp=ts_from_wire(data["timestamp"]),
        )


class ContextWindow:
    """Bounded short-term memory; eviction is oldest-first and never separates
    a tool-call from the output entry that immediately follows it."""

    def __init__(
        self,
        owner: AgentRole,
        max_entries: int = 50,
        max_chars: int = 16000,
        entries: Iterable[WindowEntry] = (),
    ):
        self.owner = owner
        self.max_entries = max_entries
        self.max_chars = max_chars
        self.entries: list[WindowEntry] = list(entries)

    def total_chars(self) -> int:
        return sum(len(e.text) for e in self.entries)

    def append(self, entry: WindowEntry) -> None:
        if not entry.text:
            raise ValueError("window entries must carry text")
        self.entries.append(entry)
        self._evict()

    def _evict(self) -> None:
        while self.entries and (
            len(self.entries) > self.max_entries
            or self.total_chars() > self.max_chars
        ):
            evicted = self.entries.pop(0)
            if (
                evicted.kind is EntryKind.TOOL_CALL
                and self.entries
                and self.entries[0].kind is EntryKind.OUTPUT
            ):
                self.entries.pop(0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "owner": self.owner.value,
            "max_entries": self.max_entries,
            "max_chars": self.max_chars,
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ContextWindow":
        return cls(
            owner=AgentRole(data["owner"]),
            max_entries=int(data["max_entries"]),
            max_chars=int(data["max_chars"]),
            entries=[WindowEntry.from_dict(e) for e in data.get("entries", [])],
        )


@dataclass(frozen=True)
class MemoryChunk:
    """A contiguous slice of the transcript with summary and embedding."""

    chunk_id: str
    start_index: int
    end_index: int  # exclusive
    first_at: datetime
    last_at: datetime
    entries: tuple[WindowEntry, ...]
    summary: str
    embedding: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "chunk_id": self.chunk_id,
            "start_index": self.start_index,
            "end_index": self.end_index,
            "first_at": ts_to_wire(self.first_at),
            "last_at": ts_to_wire(self.last_at),
            "entries": [e.to_dict() for e in self.entries],
            "summary": self.summary,
            "embedding": list(self.embedding),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MemoryChunk":
        return cls(
            chunk_id=data["chunk_id"],
            start_index=int(data["start_index"]),
            end_index=int(data["end_index"]),
            first_at=ts_from_wire(data["first_at"]),
            last_at=ts_from_wire(data["last_at"]),
            entries=tuple(WindowEntry.from_dict(e) for e in data.get("entries", [])),
            summary=data["summary"],
            embedding=tuple(float(x) for x in data["embedding"]),
        )


class ChunkStore:
    """Time-ordered chunk list; insert is idempotent per chunk id."""

    def __init__(self, chunks: Iterable[MemoryChunk] = ()):
        self.chunks: list[MemoryChunk] = list(chunks)

    def insert(self, chunk: MemoryChunk) -> bool:
        if any(c.chunk_id == chunk.chunk_id for c in self.chunks):
            return False
        self.chunks.append(chunk)
        return True

    def chunked_until(self) -> int:
        """Transcript index up to which entries are covered by chunks."""
        return self.chunks[-1].end_index if self.chunks else 0

    def to_dict(self) -> dict[str, Any]:
        return {"chunks": [c.to_dict() for c in self.chunks]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ChunkStore":
        return cls(MemoryChunk.from_dict(c) for c in data.get("chunks", []))


# --- embedding -------------------------------------------------------------


def embed_text(text: str, dim: int = EMBEDDING_DIM) -> np.ndarray:
    """Deterministic bag-of-words embedding: each token hashes to one of `dim`
    buckets (stable across runs and platforms); counts, unnormalized."""
    vec = np.zeros(dim, dtype=np.float64)
    for token in _TOKEN_RE.findall(text.lower()):
        bucket = int.from_bytes(
            hashlib.md5(token.encode("utf-8")).digest()[:4], "big"
        ) % dim
        vec[bucket] += 1.0
    return vec


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b)) / (na * nb)


# --- chunking --------------------------------------------------------------

Summarizer = Callable[[Sequence[WindowEntry]], str]
Embedder = Callable[[str], np.ndarray]
QueryExpander = Callable[[str], str]


def first_chars_summary(entries: Sequence[WindowEntry], limit: int = 160) -> str:
    """Scripted summarizer: the concatenated entry text, truncated."""
    return " ".join(e.text for e in entries)[:limit]


def identity_expansion(query: str) -> str:
    return query


def chunk_transcript(
    transcript: Sequence[WindowEntry],
    store: ChunkStore,
    summarizer: Summarizer = first_chars_summary,
    embedder: Embedder = embed_text,
    chunk_size: int = 10,
    keep_recent: int = 20,
) -> list[MemoryChunk]:
    """Group eligible transcript entries into full chunks and index them.

    Eligible entries are those past the existing chunk boundary and older
    than the most recent `keep_recent` entries; only complete chunks of
    `chunk_size` are created, the remainder stays pending. All summaries are
    produced before anything is inserted, so a summarizer failure leaves the
    store untouched and the next run retries.
    """
    start = store.chunked_until()
    horizon = max(start, len(transcript) - keep_recent)
    eligible = horizon - start
    if eligible < chunk_size:
        return []

    pending: list[MemoryChunk] = []
    offset = start
    while horizon - offset >= chunk_size:
        members = tuple(transcript[offset : offset + chunk_size])
        summary = summarizer(members)  # may raise; nothing inserted yet
        pending.append(
            MemoryChunk(
                chunk_id=f"chunk-{offset:06d}-{offset + chunk_size:06d}",
                start_index=offset,
                end_index=offset + chunk_size,
                first_at=members[0].timestamp,
                last_at=members[-1].timestamp,
                entries=members,
                summary=summary,
                embedding=tuple(embedder(summary).tolist()),
            )
        )
        offset += chunk_size

    inserted = [c for c in pending if store.insert(c)]
    return inserted


# --- retrieval -------------------------------------------------------------


@dataclass(frozen=True)
class RetrievalHit:
    chunk: MemoryChunk
    score: float


@dataclass
class RetrievalTrace:
    """Record of one retrieval, kept for offline inspection."""

    query: str
    expanded: str
    ranking: list[tuple[str, float]] = field(default_factory=list)


def retrieve(
    store: ChunkStore,
    query: str,
    k: int = 3,
    expander: QueryExpander = identity_expansion,
    embedder: Embedder = embed_text,
    trace_log: Optional[list[RetrievalTrace]] = None,
) -> list[RetrievalHit]:
    """Top-k chunks by cosine similarity of the expanded query against chunk
    summaries; ties broken by recency (newer chunk first)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    expanded = expander(query)
    if not store.chunks:
        if trace_log is not None:
            trace_log.append(RetrievalTrace(query=query, expanded=expanded))
        return []
    qvec = embedder(expanded)
    scored = [
        (cosine(qvec, np.asarray(chunk.embedding)), index, chunk)
        for index, chunk in enumerate(store.chunks)
    ]
    scored.sort(key=lambda item: (-item[0], -item[1]))
    hits = [RetrievalHit(chunk=c, score=s) for s, _, c in scored[:k]]
    if trace_log is not None:
        trace_log.append(
            RetrievalTrace(
                query=query,
                expanded=expanded,
                ranking=[(h.chunk.chunk_id, h.score) for h in hits],
            )
        )
    return hits
