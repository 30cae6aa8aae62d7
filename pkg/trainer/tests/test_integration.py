"""Cross-component checks against a real export from the pipeline
package. Skipped when claimcheck is not installed; the trainer itself
never imports it — the coupling is only through the exchanged files.
"""

from __future__ import annotations

import json

import pytest

claimcheck = pytest.importorskip("claimcheck")

from claimcheck import Claim, Dataset, EvidenceDocument, Label  # noqa: E402
from claimcheck.export import (  # noqa: E402
    AdapterConfig as ExportedAdapterConfig,
    config_for_strategy,
    emit_adapter_config,
    export_pairs,
    write_export_summary,
)
from claimcheck.selection import Strategy  # noqa: E402

from adapter_trainer.config import load_adapter_config  # noqa: E402
from adapter_trainer.pairs import validate_pairs  # noqa: E402
from adapter_trainer.training import TrainerManifest, train  # noqa: E402


def _export(tmp_path, n=12):
    claims = tuple(
        Claim(
            id=f"c{i}",
            text=f"Figure {i} moved {i + 1}% in {2001 + i}.",
            gold_label=[Label.TRUE, Label.FALSE, Label.CONFLICTING][i % 3],
        )
        for i in range(n)
    )
    evidence = {
        c.id: (
            EvidenceDocument(c.id, 1, f"Coverage of figure {i}. Sources discuss it."),
        )
        for i, c in enumerate(claims)
    }
    dataset = Dataset(claims=claims, evidence=evidence)
    pairs_path = tmp_path / "pairs.jsonl"
    summary = export_pairs(dataset, Strategy.TOP_K_BM25, pairs_path)
    write_export_summary(summary, tmp_path / "export_summary.json")
    config = config_for_strategy(
        ExportedAdapterConfig(base_model="tiny-debug", epochs=1), Strategy.TOP_K_BM25
    )
    config_path = tmp_path / "adapter_config.txt"
    emit_adapter_config(config, config_path)
    return pairs_path, config_path


def test_real_export_has_zero_rejects(tmp_path):
    pairs_path, _ = _export(tmp_path)
    report = validate_pairs(pairs_path)
    assert report.rejects == ()
    assert report.total == 12


def test_histogram_matches_export_summary(tmp_path):
    pairs_path, _ = _export(tmp_path)
    summary = json.loads((tmp_path / "export_summary.json").read_text(encoding="utf-8"))
    report = validate_pairs(pairs_path)
    assert report.per_label == summary["per_label"]
    assert report.total == summary["total"]


def test_exported_config_parses_in_trainer(tmp_path):
    _, config_path = _export(tmp_path)
    config = load_adapter_config(config_path)
    assert config.rank == 8
    assert config.alpha == 16
    assert config.dropout == 0.05
    assert config.evidence_strategy == "top_k_bm25"
    assert config.target_modules == ("q_proj", "k_proj", "v_proj", "o_proj")


def test_trainer_dry_runs_on_real_export(tmp_path):
    pairs_path, config_path = _export(tmp_path)
    result = train(
        TrainerManifest(
            pairs_path=str(pairs_path),
            adapter_config_path=str(config_path),
            output_dir=str(tmp_path / "out"),
            max_steps_override=0,
        )
    )
    assert result.dry_run
    assert result.pairs_report.total == 12
