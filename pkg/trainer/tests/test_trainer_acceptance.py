"""Trainer acceptance: the full smoke criterion in one test.

On a 16-pair toy export with the built-in small causal model, one epoch
completes, the final eval loss beats the initial one, the adapter
artifact set is emitted, and provenance echoes rank=8, alpha=16,
dropout=0.05 exactly.
"""

from __future__ import annotations

import json
import time

from safetensors.torch import load_file

from adapter_trainer.training import TrainerManifest, train

from trainer_fixtures import write_config, write_pairs


def test_acceptance_trainer_smoke(tmp_path):
    started = time.monotonic()
    pairs = write_pairs(tmp_path / "pairs.jsonl", n=16)
    config = write_config(tmp_path / "adapter_config.txt", epochs=1)
    manifest = TrainerManifest(
        pairs_path=str(pairs),
        adapter_config_path=str(config),
        output_dir=str(tmp_path / "out"),
        learning_rate=5e-3,
    )
    result = train(manifest)

    assert not result.dry_run
    assert result.steps == 8  # 16 pairs, batch 2, no accumulation, 1 epoch
    assert result.final_loss < result.initial_loss

    out = tmp_path / "out"
    weights = load_file(str(out / "adapter_model.safetensors"))
    assert weights  # adapter artifact emitted
    adapter_config = json.loads((out / "adapter_config.json").read_text())
    assert adapter_config["r"] == 8
    assert adapter_config["lora_alpha"] == 16
    assert adapter_config["lora_dropout"] == 0.05

    provenance = json.loads((out / "provenance.json").read_text())
    assert provenance["rank"] == 8
    assert provenance["alpha"] == 16
    assert provenance["dropout"] == 0.05
    assert provenance["epochs"] == 1
    assert provenance["pairs_per_label"] == {"True": 6, "False": 5, "Conflicting": 5}

    log_events = [
        json.loads(line)
        for line in (out / "training_log.jsonl").read_text().splitlines()
    ]
    assert log_events[0]["event"] == "initial_eval"
    assert log_events[-1]["event"] == "final_eval"
    assert sum(1 for e in log_events if e["event"] == "step") == 8

    elapsed = time.monotonic() - started
    print(
        f"\nACCEPTANCE PASS — trainer smoke: 1 epoch over 16 pairs, loss "
        f"{result.initial_loss:.4f} -> {result.final_loss:.4f}, adapter + provenance "
        f"echo r=8 alpha=16 dropout=0.05 ({elapsed:.1f} s)"
    )
