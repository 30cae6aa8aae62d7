"""Claim/evidence data model, JSONL ingestion, and stratified splitting.

File formats (one UTF-8 JSON record per line, stable field names):
  claims file:   {"id": str, "claim": str, "label": str|null, "language": str}
  evidence file: {"claim_id": str, "rank": int, "evidence": str}
A "version" field is reserved in both formats and ignored on read.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

MAX_EVIDENCE_PER_CLAIM = 100


class IngestError(ValueError):
    """Raised when an input file violates the documented record format."""


class Label(enum.Enum):
    """The three verdict classes. No other values are representable."""

    TRUE = "True"
    FALSE = "False"
    CONFLICTING = "Conflicting"

    def to_text(self) -> str:
        """Canonical label string as written to files and training pairs."""
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Label":
        """Parse a label case-insensitively with surrounding whitespace trimmed.

        Anything outside the three canonical names is an error, never coerced.
        """
        folded = text.strip().casefold()
        for label in cls:
            if folded == label.value.casefold():
                return label
        raise ValueError(f"unknown label {text!r}; expected one of True, False, Conflicting")


@dataclass(frozen=True)
class Claim:
    id: str
    text: str
    gold_label: Label | None = None
    language: str = "en"


@dataclass(frozen=True)
class EvidenceDocument:
    claim_id: str
    rank: int  # retrieval rank, 1 = best
    text: str


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.9
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


@dataclass(frozen=True)
class Dataset:
    """Claims plus per-claim ranked evidence. Immutable after construction."""

    claims: tuple[Claim, ...] = ()
    evidence: Mapping[str, tuple[EvidenceDocument, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.claims)

    def claim_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.claims)

    def evidence_for(self, claim_id: str) -> tuple[EvidenceDocument, ...]:
        return self.evidence.get(claim_id, ())


def _read_records(path: Path | str) -> Iterable[tuple[int, dict]]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path.name}:{line_no}: invalid JSON record: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise IngestError(f"{path.name}:{line_no}: record must be a JSON object")
            yield line_no, record


def ingest_claims(path: Path | str) -> Dataset:
    """Load a claims file into a Dataset with no evidence attached.

    Records are kept in file order. Malformed records and duplicate ids
    are errors naming the offending line / id.
    """
    path = Path(path)
    claims: list[Claim] = []
    seen: set[str] = set()
    for line_no, record in _read_records(path):
        where = f"{path.name}:{line_no}"
        claim_id = record.get("id")
        if not isinstance(claim_id, str) or not claim_id:
            raise IngestError(f"{where}: missing or empty 'id' field")
        text = record.get("claim")
        if not isinstance(text, str) or not text.strip():
            raise IngestError(f"{where}: missing or empty 'claim' field")
        if claim_id in seen:
            raise IngestError(f"{where}: duplicate claim id {claim_id!r}")
        seen.add(claim_id)
        raw_label = record.get("label")
        label: Label | None
        if raw_label is None:
            label = None
        elif isinstance(raw_label, str):
            try:
                label = Label.parse(raw_label)
            except ValueError as exc:
                raise IngestError(f"{where}: {exc}") from exc
        else:
            raise IngestError(f"{where}: 'label' must be a string or null")
        language = record.get("language", "en")
        if not isinstance(language, str):
            raise IngestError(f"{where}: 'language' must be a string")
        claims.append(Claim(id=claim_id, text=text.strip(), gold_label=label, language=language))
    return Dataset(claims=tuple(claims), evidence={})


def attach_evidence(dataset: Dataset, path: Path | str) -> Dataset:
    """Attach an evidence file to an ingested dataset.

    Evidence lists come out sorted ascending by rank. Orphan records
    (claim_id absent from the dataset), duplicate (claim_id, rank) pairs,
    and more than MAX_EVIDENCE_PER_CLAIM records per claim are errors.
    """
    path = Path(path)
    known = set(dataset.claim_ids())
    by_claim: dict[str, list[EvidenceDocument]] = {}
    ranks_seen: dict[str, set[int]] = {}
    orphans: list[str] = []
    for line_no, record in _read_records(path):
        where = f"{path.name}:{line_no}"
        claim_id = record.get("claim_id")
        if not isinstance(claim_id, str) or not claim_id:
            raise IngestError(f"{where}: missing or empty 'claim_id' field")
        rank = record.get("rank")
        if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
            raise IngestError(f"{where}: 'rank' must be an integer >= 1")
        text = record.get("evidence")
        if not isinstance(text, str):
            raise IngestError(f"{where}: missing 'evidence' field")
        if claim_id not in known:
            if claim_id not in orphans:
                orphans.append(claim_id)
            continue
        claim_ranks = ranks_seen.setdefault(claim_id, set())
        if rank in claim_ranks:
            raise IngestError(f"{where}: duplicate rank {rank} for claim {claim_id!r}")
        claim_ranks.add(rank)
        docs = by_claim.setdefault(claim_id, [])
        docs.append(EvidenceDocument(claim_id=claim_id, rank=rank, text=text))
        if len(docs) > MAX_EVIDENCE_PER_CLAIM:
            raise IngestError(
                f"{where}: claim {claim_id!r} has more than "
                f"{MAX_EVIDENCE_PER_CLAIM} evidence documents"
            )
    if orphans:
        listed = ", ".join(repr(o) for o in orphans)
        raise IngestError(f"{path.name}: evidence for unknown claim ids: {listed}")
    evidence = {cid: tuple(sorted(docs, key=lambda d: d.rank)) for cid, docs in by_claim.items()}
    return Dataset(claims=dataset.claims, evidence=evidence)


def serialize_claims(dataset: Dataset, path: Path | str) -> None:
    """Write claims back out in the ingestion format (round-trip safe)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for claim in dataset.claims:
            record = {
                "id": claim.id,
                "claim": claim.text,
                "label": claim.gold_label.to_text() if claim.gold_label else None,
                "language": claim.language,
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def serialize_evidence(dataset: Dataset, path: Path | str) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for claim in dataset.claims:
            for doc in dataset.evidence_for(claim.id):
                record = {"claim_id": doc.claim_id, "rank": doc.rank, "evidence": doc.text}
                handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def _train_count(n: int, fraction: float) -> int:
    # Exact rational arithmetic: 0.9 * 50 must give exactly 45, never 45.0000...01.
    exact = Fraction(fraction).limit_denominator(1_000_000) * n
    return min(n, math.ceil(exact))


def stratified_split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Split a fully labeled dataset into (train, validation) per label.

    Each label bucket is shuffled with a generator seeded from spec.seed,
    then the first ceil(train_fraction * count) items go to train, so the
    per-label train share is always within one item of the requested
    fraction. Claim order within each split follows the input dataset.
    Deterministic for a fixed (dataset, spec).
    """
    unlabeled = [c.id for c in dataset.claims if c.gold_label is None]
    if unlabeled:
        listed = ", ".join(repr(cid) for cid in unlabeled[:5])
        raise ValueError(f"stratified_split requires gold labels; unlabeled claims: {listed}")

    buckets: dict[Label, list[Claim]] = {label: [] for label in Label}
    for claim in dataset.claims:
        buckets[claim.gold_label].append(claim)

    rng = random.Random(spec.seed)
    train_ids: set[str] = set()
    for label in Label:
        bucket = list(buckets[label])
        rng.shuffle(bucket)
        keep = _train_count(len(bucket), spec.train_fraction)
        train_ids.update(claim.id for claim in bucket[:keep])

    train_claims = tuple(c for c in dataset.claims if c.id in train_ids)
    val_claims = tuple(c for c in dataset.claims if c.id not in train_ids)

    def subset(claims: tuple[Claim, ...]) -> Dataset:
        ev = {c.id: dataset.evidence[c.id] for c in claims if c.id in dataset.evidence}
        return Dataset(claims=claims, evidence=ev)

    return subset(train_claims), subset(val_claims)
