#!/usr/bin/env python3
# Ingest a claims/evidence corpus from JSONL and produce a stratified
# 90/10 train/validation split.

import json
import tempfile
from pathlib import Path

from claimcheck import SplitSpec, attach_evidence, ingest_claims, stratified_split

scratch = Path(tempfile.mkdtemp(prefix="claimcheck-demo-"))

# One JSON record per line. Labels are case-insensitive on read; "TRUE"
# parses the same as "True". Evidence rows carry the upstream retrieval rank.
claims_rows = []
evidence_rows = []
for i in range(60):
    label = ["True", "False", "Conflicting"][i % 3]
    claims_rows.append({"id": f"c{i}", "claim": f"Metric {i} rose {i + 1}% in {2000 + i}.", "label": label})
    evidence_rows.append({"claim_id": f"c{i}", "rank": 1, "evidence": f"Report about metric {i}."})
    evidence_rows.append({"claim_id": f"c{i}", "rank": 2, "evidence": f"Older notes on metric {i}."})

claims_path = scratch / "claims.jsonl"
evidence_path = scratch / "evidence.jsonl"
claims_path.write_text("\n".join(json.dumps(r) for r in claims_rows) + "\n")
evidence_path.write_text("\n".join(json.dumps(r) for r in evidence_rows) + "\n")

dataset = attach_evidence(ingest_claims(claims_path), evidence_path)
print("claims:", len(dataset))
print("evidence for c0:", [d.rank for d in dataset.evidence_for("c0")])

# The split shuffles inside each label bucket with a seeded generator, so a
# fixed (dataset, seed) always produces the same partition, and every
# label's train share stays within one item of the requested fraction.
train, validation = stratified_split(dataset, SplitSpec(train_fraction=0.9, seed=7))
print("train size:", len(train), " validation size:", len(validation))

by_label = {}
for claim in train.claims:
    by_label[claim.gold_label.to_text()] = by_label.get(claim.gold_label.to_text(), 0) + 1
print("train label counts:", by_label)

again, _ = stratified_split(dataset, SplitSpec(train_fraction=0.9, seed=7))
print("deterministic:", [c.id for c in again.claims] == [c.id for c in train.claims])
