"""Rule-based sentence segmentation and tokenization for evidence text.

Dependency-free and deterministic: a sentence boundary is a run of
terminators ([.?!]) followed by whitespace and an uppercase letter or
digit, unless the terminator closes a known abbreviation or a dotted
acronym ("U.S.", "e.g."). Periods inside decimal numbers never split
because they are not followed by whitespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import EvidenceDocument

# Lowercased words that commonly precede a non-terminal period.
ABBREVIATIONS = frozenset(
    {
        "mr", "mrs", "ms", "dr", "prof", "rev", "gen", "sen", "rep", "gov",
        "sr", "jr", "st", "no", "vs", "etc", "al", "eg", "ie", "cf",
        "approx", "dept", "est", "fig", "inc", "ltd", "co", "corp",
        "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
        "oct", "nov", "dec",
    }
)

# Dotted acronym or initial ending right before the candidate period,
# e.g. "U.S" in "U.S." or a bare initial "J". Must span the whole word.
_ACRONYM_WORD = re.compile(r"(?:[A-Za-z]\.)*[A-Za-z]")

_BOUNDARY = re.compile(r"([.?!]+)(\s+)(?=[A-Z0-9])")

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> tuple[str, ...]:
    """Lowercase tokens split on any non-alphanumeric character.

    Digit runs are kept as tokens (numerals carry the signal in numerical
    claims); underscores split; no stemming or stopword removal.
    """
    return tuple(_TOKEN.findall(text.lower()))


@dataclass(frozen=True)
class SentenceUnit:
    doc_rank: int
    position: int  # index within the source document, strictly increasing
    text: str
    tokens: tuple[str, ...]

    @classmethod
    def from_text(cls, doc_rank: int, position: int, text: str) -> "SentenceUnit":
        return cls(doc_rank=doc_rank, position=position, text=text, tokens=tokenize(text))


def _is_abbreviation_boundary(text: str, dot_index: int) -> bool:
    """True when the period starting at dot_index closes an abbreviation."""
    head = text[:dot_index]
    parts = head.split()
    if not parts:
        return False
    word = parts[-1].lstrip("(\"'[").rstrip(".")
    if not word:
        return False
    if word.lower() in ABBREVIATIONS:
        return True
    return bool(_ACRONYM_WORD.fullmatch(word))


def split_sentences(text: str) -> list[str]:
    """Split text into sentence strings; boundary whitespace is dropped.

    Concatenation of the results (joined on single spaces) equals the
    input text modulo whitespace.
    """
    if not text.strip():
        return []
    cut_points: list[int] = []
    for match in _BOUNDARY.finditer(text):
        terminators = match.group(1)
        # Only plain periods are ambiguous; "?" / "!" runs always split.
        if set(terminators) == {"."} and _is_abbreviation_boundary(text, match.start(1)):
            continue
        cut_points.append(match.end(1))
    pieces: list[str] = []
    start = 0
    for cut in cut_points:
        piece = text[start:cut].strip()
        if piece:
            pieces.append(piece)
        start = cut
    tail = text[start:].strip()
    if tail:
        pieces.append(tail)
    return pieces


def segment_sentences(document: EvidenceDocument) -> list[SentenceUnit]:
    """Segment one evidence document into positioned sentence units."""
    return [
        SentenceUnit.from_text(document.rank, position, sentence)
        for position, sentence in enumerate(split_sentences(document.text))
    ]
