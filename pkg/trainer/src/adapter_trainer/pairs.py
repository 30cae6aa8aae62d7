"""Validation and loading of exported prompt-response pair files.

A pair file is line-delimited JSON with fields prompt, response,
claim_id (strategy is carried along when present). Responses must be
exactly one of the three canonical labels; anything else is rejected
with a reason so a bad export never reaches the optimizer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

CANONICAL_LABELS = ("True", "False", "Conflicting")


class PairsError(ValueError):
    """Pair file is missing or structurally malformed."""


@dataclass(frozen=True)
class TrainingPair:
    prompt: str
    response: str
    claim_id: str


@dataclass(frozen=True)
class PairsReport:
    total: int
    per_label: dict[str, int]
    rejects: tuple[tuple[int, str], ...]  # (line number, reason)

    @property
    def accepted(self) -> int:
        return self.total - len(self.rejects)


def validate_pairs(path: Path | str) -> PairsReport:
    """Count labels and collect rejects without loading pairs into memory."""
    report, _ = _scan(path)
    return report


def load_pairs(path: Path | str) -> tuple[PairsReport, list[TrainingPair]]:
    return _scan(path)


def _scan(path: Path | str) -> tuple[PairsReport, list[TrainingPair]]:
    path = Path(path)
    if not path.exists():
        raise PairsError(f"pair file not found: {path}")
    per_label = {label: 0 for label in CANONICAL_LABELS}
    rejects: list[tuple[int, str]] = []
    pairs: list[TrainingPair] = []
    total = 0
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            total += 1
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PairsError(f"{path.name}:{line_no}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise PairsError(f"{path.name}:{line_no}: record must be a JSON object")
            prompt = record.get("prompt")
            response = record.get("response")
            claim_id = record.get("claim_id", "")
            if not isinstance(prompt, str) or not prompt:
                raise PairsError(f"{path.name}:{line_no}: missing or empty 'prompt'")
            if not isinstance(response, str):
                raise PairsError(f"{path.name}:{line_no}: missing 'response'")
            if response not in CANONICAL_LABELS:
                rejects.append(
                    (line_no, f"response {response!r} is not one of {CANONICAL_LABELS}")
                )
                continue
            per_label[response] += 1
            pairs.append(TrainingPair(prompt=prompt, response=response, claim_id=str(claim_id)))
    report = PairsReport(total=total, per_label=per_label, rejects=tuple(rejects))
    return report, pairs
