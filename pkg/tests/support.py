"""Shared helpers: tiny JSONL writers and a deterministic synthetic corpus.

The 30-claim synthetic set is built so the offline mock backend produces
a mix of all three labels: one third of the claims are restated verbatim
in their evidence (mock answers True), one third carry a "debunked"
sentence (False), and one third have neither signal (Conflicting).
Every fifth claim gets extra filler sentences so the three selection
strategies genuinely disagree about which sentences survive.
"""

from __future__ import annotations

import json
from pathlib import Path

DATA_DIR = Path(__file__).parent / "data"


def write_jsonl(path: Path, records: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return path


def make_synthetic_records(n: int = 30) -> tuple[list[dict], list[dict]]:
    """Deterministic claims + evidence records for end-to-end runs."""
    claims: list[dict] = []
    evidence: list[dict] = []
    for i in range(n):
        cid = f"c{i:03d}"
        kind = i % 3
        if kind == 0:
            text = f"Program {i} served {1000 + i} families in {2000 + i}."
            label = "True"
            primary = (
                f"{text} The figure comes from the annual report."
            )
        elif kind == 1:
            text = f"City {i} spent {i + 5} million dollars on roads in {1990 + i}."
            label = "False"
            primary = (
                f"The {i + 5} million road figure for city {i} was debunked by auditors. "
                f"Spending records for {1990 + i} show a smaller amount."
            )
        else:
            text = f"Region {i} grew {i + 2}% last year."
            label = "Conflicting"
            primary = (
                f"One report shows region {i} growth near {i + 2} percent. "
                "A newer survey disagrees sharply."
            )
        claims.append({"id": cid, "claim": text, "label": label, "language": "en"})
        evidence.append({"claim_id": cid, "rank": 1, "evidence": primary})
        evidence.append(
            {
                "claim_id": cid,
                "rank": 2,
                "evidence": f"Background item {i}: officials commented on methodology.",
            }
        )
        if i % 5 == 4:
            evidence.append(
                {
                    "claim_id": cid,
                    "rank": 3,
                    "evidence": (
                        f"Archive note {i}: unrelated budget tables from {1980 + i}. "
                        f"A second line mentions weather in {1980 + i}. "
                        "A third line lists committee members."
                    ),
                }
            )
    return claims, evidence
