#!/usr/bin/env python3
# Export supervised fine-tuning artifacts: prompt-response pairs (the
# rendered claim+evidence instruction as prompt, the gold label as
# response) plus the adapter configuration the trainer consumes.

import json
import tempfile
from pathlib import Path

from claimcheck import (
    AdapterConfig,
    Claim,
    Dataset,
    EvidenceDocument,
    Label,
    emit_adapter_config,
    export_pairs,
    load_adapter_config,
)
from claimcheck.export import config_for_strategy
from claimcheck.selection import Strategy

scratch = Path(tempfile.mkdtemp(prefix="claimcheck-demo-"))

claims = tuple(
    Claim(id=f"c{i}", text=f"Indicator {i} changed {i + 1}% in {2010 + i}.",
          gold_label=[Label.TRUE, Label.FALSE, Label.CONFLICTING][i % 3])
    for i in range(6)
)
evidence = {
    c.id: (EvidenceDocument(c.id, 1, f"Coverage of indicator {i}. Figures vary by source."),)
    for i, c in enumerate(claims)
}
dataset = Dataset(claims=claims, evidence=evidence)

summary = export_pairs(dataset, Strategy.TOP_K_BM25, scratch / "pairs.jsonl")
print("pairs written:", summary.total, "per label:", dict(summary.per_label))

first = json.loads((scratch / "pairs.jsonl").read_text().splitlines()[0])
print("\nfirst pair response:", first["response"])
print("first pair prompt starts:", first["prompt"].splitlines()[0])

# Adapter defaults: rank 8, alpha 16, dropout 0.05 on the query/key/value/
# output projections, 3 epochs, batch 2 with 4-step gradient accumulation.
config = config_for_strategy(AdapterConfig(), Strategy.TOP_K_BM25)
emit_adapter_config(config, scratch / "adapter_config.txt")
print("\nadapter config file:")
print((scratch / "adapter_config.txt").read_text())

# The flat key=value file round-trips exactly.
print("round trip ok:", load_adapter_config(scratch / "adapter_config.txt") == config)
print("\nfeed these two files to the trainer package: see trainer/README.md")
