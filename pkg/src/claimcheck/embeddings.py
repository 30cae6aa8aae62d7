"""Sentence-embedding providers and cosine similarity.

Two providers share one interface:

* HttpEmbedder — POST /embed {"model": str, "texts": [str]} ->
  {"vectors": [[float]]}, with bounded retries, batching, dimension
  checks, and an optional on-disk cache.
* StubEmbedder — fully offline and platform-independent. Each text maps
  to a unit vector derived from its SHA-256 digest: component i is the
  big-endian uint64 of sha256(digest || i_as_2_bytes)[:8], scaled to
  [-1, 1), and the vector is then L2-normalized. Dimension defaults
  to 16.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, Sequence

import numpy as np

from .transport import post_json

CACHE_FORMAT = "embedding-cache"
CACHE_VERSION = 1


class EmbeddingError(RuntimeError):
    """Embedding provider failure; carries the indices of the failed batch."""

    def __init__(self, message: str, failed_indices: tuple[int, ...] = ()):
        super().__init__(message)
        self.failed_indices = failed_indices


class Embedder(Protocol):
    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]: ...


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    endpoint: str = "http://localhost:8080/embed"
    model_name: str = "sentence-transformers/all-MiniLM-L6-v2"
    batch_size: int = 32
    timeout: float = 30.0
    cache_path: Path | None = None

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u, v) / (|u| |v|); defined as 0.0 if either norm is zero."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    return float(np.dot(u, v) / (norm_u * norm_v))


class StubEmbedder:
    """Deterministic offline embedder (see module docstring for the rule)."""

    def __init__(self, dimension: int = 16):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension

    def embed_one(self, text: str) -> np.ndarray:
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        raw = np.empty(self.dimension, dtype=float)
        for i in range(self.dimension):
            expanded = hashlib.sha256(digest + i.to_bytes(2, "big")).digest()
            value = int.from_bytes(expanded[:8], "big")
            raw[i] = value / 2.0**64 * 2.0 - 1.0
        norm = float(np.linalg.norm(raw))
        return raw / norm if norm else raw

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        if not texts:
            raise EmbeddingError("embed_batch requires at least one text")
        return [self.embed_one(text) for text in texts]


def _content_hash(model_name: str, text: str) -> str:
    return hashlib.sha256(f"{model_name}\x00{text}".encode("utf-8")).hexdigest()


class HttpEmbedder:
    """JSON-over-HTTP embedding client with a content-hash cache.

    The cache file is line-delimited: a versioned header line followed by
    {"hash": ..., "vector": [...]} entries. Cache writes go through a
    single lock so concurrent selection workers can share one client.
    """

    def __init__(
        self,
        config: EmbeddingProviderConfig,
        transport: Callable[..., dict] = post_json,
    ):
        self.config = config
        self._transport = transport
        self._dimension: int | None = None
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()
        self.network_calls = 0
        if config.cache_path is not None:
            self._load_cache(Path(config.cache_path))

    def _load_cache(self, path: Path) -> None:
        if not path.exists():
            return
        with path.open("r", encoding="utf-8") as handle:
            header_line = handle.readline()
            if not header_line.strip():
                return
            header = json.loads(header_line)
            if header.get("format") != CACHE_FORMAT or header.get("version") != CACHE_VERSION:
                raise EmbeddingError(f"unsupported cache header in {path}")
            self._dimension = header.get("dimension")
            for line in handle:
                if not line.strip():
                    continue
                entry = json.loads(line)
                self._cache[entry["hash"]] = np.asarray(entry["vector"], dtype=float)

    def _append_cache(self, new_entries: dict[str, np.ndarray]) -> None:
        path = self.config.cache_path
        if path is None or not new_entries:
            return
        path = Path(path)
        with self._lock:
            fresh = not path.exists() or path.stat().st_size == 0
            with path.open("a", encoding="utf-8") as handle:
                if fresh:
                    header = {
                        "format": CACHE_FORMAT,
                        "version": CACHE_VERSION,
                        "model": self.config.model_name,
                        "dimension": self._dimension,
                    }
                    handle.write(json.dumps(header, sort_keys=True) + "\n")
                for key, vector in new_entries.items():
                    record = {"hash": key, "vector": [float(x) for x in vector]}
                    handle.write(json.dumps(record, sort_keys=True) + "\n")

    def _fetch(self, texts: list[str], base_index: int) -> list[np.ndarray]:
        payload = {"model": self.config.model_name, "texts": texts}
        try:
            body = self._transport(
                self.config.endpoint, payload, timeout=self.config.timeout
            )
        except Exception as exc:
            indices = tuple(range(base_index, base_index + len(texts)))
            raise EmbeddingError(
                f"embedding request failed for batch at indices {indices[0]}..{indices[-1]}: {exc}",
                failed_indices=indices,
            ) from exc
        self.network_calls += 1
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise EmbeddingError(
                f"provider returned {len(vectors) if isinstance(vectors, list) else 'no'} "
                f"vectors for {len(texts)} texts",
                failed_indices=tuple(range(base_index, base_index + len(texts))),
            )
        out: list[np.ndarray] = []
        for offset, values in enumerate(vectors):
            vector = np.asarray(values, dtype=float)
            if self._dimension is None:
                self._dimension = int(vector.shape[0])
            elif vector.shape[0] != self._dimension:
                raise EmbeddingError(
                    f"dimension mismatch at index {base_index + offset}: "
                    f"got {vector.shape[0]}, expected {self._dimension}",
                    failed_indices=(base_index + offset,),
                )
            out.append(vector)
        return out

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        """One vector per input, order-preserving; cache hits skip the network.

        Repeated texts within one call are requested once and fanned back out.
        """
        if not texts:
            raise EmbeddingError("embed_batch requires at least one text")
        keys = [_content_hash(self.config.model_name, text) for text in texts]
        missing: dict[str, tuple[int, str]] = {}  # key -> (first input index, text)
        for index, (key, text) in enumerate(zip(keys, texts)):
            if key not in self._cache and key not in missing:
                missing[key] = (index, text)
        items = list(missing.items())
        fetched: dict[str, np.ndarray] = {}
        for start in range(0, len(items), self.config.batch_size):
            chunk = items[start : start + self.config.batch_size]
            vectors = self._fetch(
                [text for _, (_, text) in chunk], base_index=chunk[0][1][0]
            )
            for (key, _), vector in zip(chunk, vectors):
                fetched[key] = vector
        if fetched:
            self._cache.update(fetched)
            self._append_cache(fetched)
        return [self._cache[key] for key in keys]
