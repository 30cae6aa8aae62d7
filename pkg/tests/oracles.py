"""Independent brute-force oracles for cross-checking the library.

These deliberately share no code with the package: BM25 is recomputed
from the formula with its own df/idf bookkeeping, cosine goes through
math.fsum instead of numpy, and the metric tally walks the raw label
pairs instead of a confusion matrix.
"""

from __future__ import annotations

import math
from typing import Sequence


def bm25_scores_brute_force(
    claim_tokens: Sequence[str],
    sentence_token_lists: Sequence[Sequence[str]],
    k1: float = 1.2,
    b: float = 0.75,
) -> list[float]:
    """Score every sentence against the claim, straight from the formula."""
    n = len(sentence_token_lists)
    if n == 0:
        return []
    total_len = sum(len(tokens) for tokens in sentence_token_lists)
    avg_len = total_len / n if n else 0.0
    scores: list[float] = []
    for tokens in sentence_token_lists:
        score = 0.0
        for term in sorted(set(claim_tokens)):
            tf = sum(1 for tok in tokens if tok == term)
            if tf == 0:
                continue
            df = sum(1 for other in sentence_token_lists if term in other)
            idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            if avg_len == 0:
                norm = 1.0
            else:
                norm = len(tokens) / avg_len
            score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * norm))
        scores.append(score)
    return scores


def top_k_brute_force(
    scores: Sequence[float],
    doc_ranks: Sequence[int],
    positions: Sequence[int],
    k: int,
) -> list[int]:
    """Indices of the k best sentences; ties by (doc rank, position)."""
    order = sorted(
        range(len(scores)),
        key=lambda i: (-scores[i], doc_ranks[i], positions[i]),
    )
    return order[:k]


def cosine_high_precision(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity via fsum, independent of numpy."""
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    dot = math.fsum(a * b for a, b in zip(u, v))
    norm_u = math.sqrt(math.fsum(a * a for a in u))
    norm_v = math.sqrt(math.fsum(b * b for b in v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    return dot / (norm_u * norm_v)


def confusion_counts_brute_force(
    gold: Sequence[str], predicted: Sequence[str], label_order: Sequence[str]
) -> list[list[int]]:
    """3x3 (or NxN) counts by walking the pairs one by one."""
    grid = [[0 for _ in label_order] for _ in label_order]
    index = {name: i for i, name in enumerate(label_order)}
    for g, p in zip(gold, predicted):
        grid[index[g]][index[p]] += 1
    return grid


def class_metrics_brute_force(
    gold: Sequence[str], predicted: Sequence[str], label: str
) -> tuple[float, float, float, int]:
    """(precision, recall, f1, support) for one label, tallied from pairs."""
    tp = sum(1 for g, p in zip(gold, predicted) if g == label and p == label)
    fp = sum(1 for g, p in zip(gold, predicted) if g != label and p == label)
    fn = sum(1 for g, p in zip(gold, predicted) if g == label and p != label)
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    support = sum(1 for g in gold if g == label)
    return precision, recall, f1, support


def macro_f1_brute_force(
    gold: Sequence[str], predicted: Sequence[str], label_order: Sequence[str]
) -> float:
    f1s = [class_metrics_brute_force(gold, predicted, label)[2] for label in label_order]
    return sum(f1s) / len(f1s)
