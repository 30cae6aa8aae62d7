"""Evidence granularity strategies: full document, top-k BM25 sentences,
top-k embedding-cosine sentences.

BM25 is the Okapi variant with a non-negative IDF floor:

    score(q, s) = sum over distinct query terms t of
        ln(1 + (N - df_t + 0.5) / (df_t + 0.5))
        * tf_t * (k1 + 1) / (tf_t + k1 * (1 - b + b * |s| / avg_len))

Corpus statistics (N, df, avg_len) are computed per claim over the
sentences of that claim's own retrieved documents, never globally.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Claim, EvidenceDocument
from .embeddings import EmbeddingError, Embedder, cosine_similarity
from .sentences import SentenceUnit, segment_sentences, tokenize

DEFAULT_TOP_K = 3
DEFAULT_DOC_LIMIT = 10


class SelectionError(ValueError):
    """Raised when a strategy cannot produce evidence for a claim."""


class Strategy(enum.Enum):
    FULL_DOCUMENT = "full_document"
    TOP_K_BM25 = "top_k_bm25"
    TOP_K_SEMANTIC = "top_k_semantic"


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2  # term-frequency saturation
    b: float = 0.75  # length normalization, in [0, 1]

    def __post_init__(self) -> None:
        if self.k1 <= 0:
            raise ValueError(f"k1 must be positive, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class CorpusStats:
    """Per-claim sentence statistics feeding BM25."""

    sentence_count: int
    doc_freq: Mapping[str, int]
    avg_len: float

    @classmethod
    def from_sentences(cls, sentences: Sequence[SentenceUnit]) -> "CorpusStats":
        df: Counter[str] = Counter()
        total = 0
        for sentence in sentences:
            total += len(sentence.tokens)
            df.update(set(sentence.tokens))
        avg = total / len(sentences) if sentences else 0.0
        return cls(sentence_count=len(sentences), doc_freq=dict(df), avg_len=avg)


@dataclass(frozen=True)
class SelectedEvidence:
    """Result of one strategy for one claim: texts best-first plus scores."""

    claim_id: str
    strategy: Strategy
    units: tuple[str, ...]
    scores: tuple[float, ...]
    # (doc_rank, position) per unit for sentence strategies; empty otherwise.
    origins: tuple[tuple[int, int], ...] = ()
    warning: str | None = None

    def __post_init__(self) -> None:
        if len(self.units) != len(self.scores):
            raise ValueError("units and scores must be parallel")
        if any(a < b for a, b in zip(self.scores, self.scores[1:])):
            raise ValueError("scores must be non-increasing")


def bm25_score(
    claim_tokens: Sequence[str],
    sentence: SentenceUnit,
    stats: CorpusStats,
    params: Bm25Params = Bm25Params(),
) -> float:
    """Okapi BM25 score of one sentence against the claim's token list.

    Distinct claim tokens are iterated in first-occurrence order so the
    floating-point summation order is reproducible. An empty claim token
    list scores 0 (callers surface the condition as a warning).
    """
    if not claim_tokens:
        return 0.0
    tf = Counter(sentence.tokens)
    length = len(sentence.tokens)
    norm = 1.0 if stats.avg_len == 0 else length / stats.avg_len
    denom_tail = params.k1 * (1.0 - params.b + params.b * norm)
    score = 0.0
    for term in dict.fromkeys(claim_tokens):
        frequency = tf.get(term, 0)
        if frequency == 0:
            continue
        df = stats.doc_freq.get(term, 0)
        idf = math.log(1.0 + (stats.sentence_count - df + 0.5) / (df + 0.5))
        score += idf * frequency * (params.k1 + 1.0) / (frequency + denom_tail)
    return score


def _gather_sentences(
    documents: Sequence[EvidenceDocument], doc_limit: int
) -> list[SentenceUnit]:
    ordered = sorted(documents, key=lambda d: d.rank)[:doc_limit]
    sentences: list[SentenceUnit] = []
    for document in ordered:
        sentences.extend(segment_sentences(document))
    return sentences


def _take_top_k(
    scored: list[tuple[float, SentenceUnit]], k: int
) -> tuple[tuple[str, ...], tuple[float, ...], tuple[tuple[int, int], ...]]:
    # Ties break toward the better-retrieved document, then earlier position.
    ranked = sorted(scored, key=lambda item: (-item[0], item[1].doc_rank, item[1].position))
    top = ranked[:k]
    texts = tuple(unit.text for _, unit in top)
    scores = tuple(score for score, _ in top)
    origins = tuple((unit.doc_rank, unit.position) for _, unit in top)
    return texts, scores, origins


def select_top_k_bm25(
    claim: Claim,
    documents: Sequence[EvidenceDocument],
    k: int = DEFAULT_TOP_K,
    params: Bm25Params = Bm25Params(),
    doc_limit: int = DEFAULT_DOC_LIMIT,
) -> SelectedEvidence:
    """Pick the k highest-BM25 sentences across the claim's top documents."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    sentences = _gather_sentences(documents, doc_limit)
    claim_tokens = tokenize(claim.text)
    warning = None if claim_tokens else "claim has no tokens; all scores 0"
    stats = CorpusStats.from_sentences(sentences)
    scored = [(bm25_score(claim_tokens, s, stats, params), s) for s in sentences]
    texts, scores, origins = _take_top_k(scored, k)
    return SelectedEvidence(
        claim_id=claim.id,
        strategy=Strategy.TOP_K_BM25,
        units=texts,
        scores=scores,
        origins=origins,
        warning=warning,
    )


def select_top_k_semantic(
    claim: Claim,
    documents: Sequence[EvidenceDocument],
    embedder: Embedder,
    k: int = DEFAULT_TOP_K,
    doc_limit: int = DEFAULT_DOC_LIMIT,
) -> SelectedEvidence:
    """Pick the k sentences with the highest cosine similarity to the claim."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    sentences = _gather_sentences(documents, doc_limit)
    if not sentences:
        return SelectedEvidence(
            claim_id=claim.id, strategy=Strategy.TOP_K_SEMANTIC, units=(), scores=()
        )
    try:
        vectors = embedder.embed_batch([claim.text] + [s.text for s in sentences])
    except EmbeddingError as exc:
        raise EmbeddingError(
            f"embedding failed for claim {claim.id!r}: {exc}", failed_indices=exc.failed_indices
        ) from exc
    claim_vector = vectors[0]
    scored = [
        (cosine_similarity(claim_vector, vector), sentence)
        for vector, sentence in zip(vectors[1:], sentences)
    ]
    texts, scores, origins = _take_top_k(scored, k)
    return SelectedEvidence(
        claim_id=claim.id,
        strategy=Strategy.TOP_K_SEMANTIC,
        units=texts,
        scores=scores,
        origins=origins,
    )


def select_full_document(
    claim: Claim, documents: Sequence[EvidenceDocument]
) -> SelectedEvidence:
    """Pass the rank-1 retrieved document through verbatim (no truncation)."""
    if not documents:
        raise SelectionError(f"claim {claim.id!r} has no evidence documents")
    best = min(documents, key=lambda d: d.rank)
    return SelectedEvidence(
        claim_id=claim.id,
        strategy=Strategy.FULL_DOCUMENT,
        units=(best.text,),
        scores=(0.0,),
    )


def select(
    claim: Claim,
    documents: Sequence[EvidenceDocument],
    strategy: Strategy,
    k: int = DEFAULT_TOP_K,
    params: Bm25Params = Bm25Params(),
    doc_limit: int = DEFAULT_DOC_LIMIT,
    embedder: Embedder | None = None,
) -> SelectedEvidence:
    """Dispatch to the strategy named by `strategy`."""
    if strategy is Strategy.FULL_DOCUMENT:
        return select_full_document(claim, documents)
    if strategy is Strategy.TOP_K_BM25:
        return select_top_k_bm25(claim, documents, k=k, params=params, doc_limit=doc_limit)
    if strategy is Strategy.TOP_K_SEMANTIC:
        if embedder is None:
            raise ValueError("semantic selection requires an embedder")
        return select_top_k_semantic(claim, documents, embedder, k=k, doc_limit=doc_limit)
    raise ValueError(f"unknown strategy: {strategy}")
