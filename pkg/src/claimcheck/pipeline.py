"""End-to-end orchestration: ingest -> select -> verify -> parse ->
evaluate, one run directory per (backend, strategy) cell.

Run directory layout (append-only; a rerun goes to a fresh directory):
    manifest.json      resolved config, input hashes, start time
    selections.jsonl   claim_id, strategy, evidence texts, scores
    generations.jsonl  claim_id, prompt hash, raw text, latency, params
    verdicts.jsonl     claim_id, label, rule id, span, fallback flag
    report.json        machine-readable evaluation report
    report.txt         aligned human-readable report
Claims with no usable evidence are skipped before the verify stage and
counted in the report metadata instead of being scored.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import metrics
from .corpus import Dataset, IngestError, attach_evidence, ingest_claims
from .embeddings import Embedder, EmbeddingProviderConfig, HttpEmbedder, StubEmbedder
from .gateway import (
    ChatBackend,
    GenerationParams,
    HttpChatBackend,
    MockBackend,
    RecordReplayBackend,
    RenderedPrompt,
    render_prompt,
    run_batch,
)
from .selection import Bm25Params, SelectedEvidence, Strategy, select
from .verdicts import DEFAULT_RULES, ParseRule, load_rules, parse_batch

MANIFEST_VERSION = 1


class StageError(RuntimeError):
    """Wraps a module error with the pipeline stage and claim context."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class RunConfig:
    claims_path: str
    evidence_path: str
    out_dir: str
    strategy: Strategy = Strategy.TOP_K_BM25
    k: int = 3
    doc_limit: int = 10
    backend: str = "mock"  # "mock" | "replay:<path>" | "record:<path>:<inner>" | http(s) URL
    embedder: str = "stub"  # "stub" | http(s) URL
    embedding_model: str = "sentence-transformers/all-MiniLM-L6-v2"
    embedding_cache: str | None = None
    params: GenerationParams = field(default_factory=GenerationParams)
    concurrency: int = 1
    failure_threshold: float = 0.2
    budget_tokens: int = 4096
    rules_path: str | None = None
    run_name: str = "run"
    seed: int = 0

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["strategy"] = self.strategy.value
        payload["params"] = asdict(self.params)
        return payload

    @classmethod
    def from_dict(cls, payload: Mapping) -> "RunConfig":
        data = dict(payload)
        data["strategy"] = Strategy(data["strategy"])
        data["params"] = GenerationParams(**data["params"])
        return cls(**data)


@dataclass(frozen=True)
class RunArtifacts:
    out_dir: Path
    manifest_path: Path
    selections_path: Path
    generations_path: Path
    verdicts_path: Path
    report_json_path: Path
    report_text_path: Path
    report: metrics.EvaluationReport


def build_embedder(config: RunConfig) -> Embedder:
    if config.embedder == "stub":
        return StubEmbedder()
    if config.embedder.startswith(("http://", "https://")):
        provider = EmbeddingProviderConfig(
            endpoint=config.embedder,
            model_name=config.embedding_model,
            cache_path=Path(config.embedding_cache) if config.embedding_cache else None,
        )
        return HttpEmbedder(provider)
    raise ValueError(f"unknown embedder spec: {config.embedder!r}")


def build_backend(spec: str) -> ChatBackend:
    if spec == "mock":
        return MockBackend()
    if spec.startswith("replay:"):
        return RecordReplayBackend(spec.split(":", 1)[1], mode="replay")
    if spec.startswith("record:"):
        rest = spec.split(":", 1)[1]
        store_path, _, inner_spec = rest.partition(":")
        inner = build_backend(inner_spec or "mock")
        return RecordReplayBackend(store_path, mode="record", inner=inner)
    if spec.startswith(("http://", "https://")):
        return HttpChatBackend(endpoint=spec)
    raise ValueError(f"unknown backend spec: {spec!r}")


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_jsonl(path: Path, records: Sequence[Mapping]) -> None:
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def load_dataset(claims_path: str | Path, evidence_path: str | Path | None) -> Dataset:
    dataset = ingest_claims(claims_path)
    if evidence_path is not None:
        dataset = attach_evidence(dataset, evidence_path)
    return dataset


def run(config: RunConfig) -> RunArtifacts:
    """Execute one pipeline cell and write its artifact set."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.json"
    if manifest_path.exists():
        raise StageError("setup", f"run directory {out_dir} already holds a manifest; "
                                  "runs are append-only, use a fresh directory")

    claims_path = Path(config.claims_path)
    evidence_path = Path(config.evidence_path)
    try:
        dataset = load_dataset(claims_path, evidence_path)
    except (IngestError, OSError) as exc:
        raise StageError("ingest", str(exc)) from exc

    manifest = {
        "format": "run-manifest",
        "version": MANIFEST_VERSION,
        "started_at": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "config": config.to_dict(),
        "inputs": {
            "claims_sha256": _sha256_file(claims_path),
            "evidence_sha256": _sha256_file(evidence_path),
        },
    }
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    embedder = (
        build_embedder(config) if config.strategy is Strategy.TOP_K_SEMANTIC else None
    )
    rules: Sequence[ParseRule] = (
        load_rules(config.rules_path) if config.rules_path else DEFAULT_RULES
    )

    # --- select ---
    selections: dict[str, SelectedEvidence] = {}
    skipped_no_evidence: list[str] = []
    for claim in dataset.claims:
        documents = dataset.evidence_for(claim.id)
        if not documents:
            skipped_no_evidence.append(claim.id)
            continue
        try:
            selected = select(
                claim,
                documents,
                config.strategy,
                k=config.k,
                params=Bm25Params(),
                doc_limit=config.doc_limit,
                embedder=embedder,
            )
        except Exception as exc:
            raise StageError("select", f"claim {claim.id!r}: {exc}") from exc
        if not selected.units:
            skipped_no_evidence.append(claim.id)
            continue
        selections[claim.id] = selected
    selections_path = out_dir / "selections.jsonl"
    _write_jsonl(
        selections_path,
        [
            {
                "claim_id": s.claim_id,
                "strategy": s.strategy.value,
                "evidence": list(s.units),
                "scores": [float(x) for x in s.scores],
                "origins": [list(o) for o in s.origins],
                "warning": s.warning,
            }
            for s in selections.values()
        ],
    )

    # --- verify ---
    backend = build_backend(config.backend)
    jobs: list[tuple[str, RenderedPrompt]] = []
    for claim in dataset.claims:
        if claim.id not in selections:
            continue
        try:
            prompt = render_prompt(
                claim.text, selections[claim.id], budget_tokens=config.budget_tokens
            )
        except ValueError as exc:
            raise StageError("verify", f"claim {claim.id!r}: {exc}") from exc
        jobs.append((claim.id, prompt))
    try:
        results = run_batch(
            jobs,
            config.params,
            backend,
            concurrency=config.concurrency,
            failure_threshold=config.failure_threshold,
        )
    except Exception as exc:
        raise StageError("verify", str(exc)) from exc
    generations_path = out_dir / "generations.jsonl"
    _write_jsonl(
        generations_path,
        [
            {
                "claim_id": r.claim_id,
                "prompt_sha256": r.prompt_sha256,
                "raw_text": r.raw_text,
                "latency_ms": round(r.latency * 1000.0, 3),
                "backend": r.backend,
                "truncated_evidence": r.truncated_evidence,
                "error": r.error,
                "params": asdict(config.params),
            }
            for r in results
        ],
    )

    # --- parse ---
    ok_results = [r for r in results if r.error is None]
    parsed = parse_batch([(r.claim_id, r.raw_text) for r in ok_results], rules)
    verdicts_path = out_dir / "verdicts.jsonl"
    _write_jsonl(
        verdicts_path,
        [
            {
                "claim_id": claim_id,
                "label": verdict.label.to_text(),
                "rule_id": verdict.rule_id,
                "matched_span": list(verdict.matched_span) if verdict.matched_span else None,
                "fallback_used": verdict.fallback_used,
            }
            for claim_id, verdict in parsed.verdicts
        ],
    )

    # --- evaluate ---
    by_id = {claim.id: claim for claim in dataset.claims}
    gold = []
    predicted = []
    unlabeled = 0
    for claim_id, verdict in parsed.verdicts:
        claim = by_id[claim_id]
        if claim.gold_label is None:
            unlabeled += 1
            continue
        gold.append(claim.gold_label)
        predicted.append(verdict.label)
    if not gold:
        raise StageError("evaluate", "no labeled claims were scored")
    failures = len(results) - len(ok_results)
    metadata = {
        "run": config.run_name,
        "strategy": config.strategy.value,
        "model": config.params.model_name,
        "backend": backend.name,
        "fallback_rate": parsed.fallback_rate,
        "claims_total": len(dataset),
        "claims_evaluated": len(gold),
        "claims_skipped_no_evidence": len(skipped_no_evidence),
        "claims_unlabeled": unlabeled,
        "generation_failures": failures,
    }
    report = metrics.evaluate(gold, predicted, metadata=metadata)
    report_json_path = out_dir / "report.json"
    report_json_path.write_text(
        json.dumps(metrics.report_to_dict(report), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    report_text_path = out_dir / "report.txt"
    report_text_path.write_text(metrics.render_report(report), encoding="utf-8")

    return RunArtifacts(
        out_dir=out_dir,
        manifest_path=manifest_path,
        selections_path=selections_path,
        generations_path=generations_path,
        verdicts_path=verdicts_path,
        report_json_path=report_json_path,
        report_text_path=report_text_path,
        report=report,
    )


@dataclass(frozen=True)
class GridResult:
    table: metrics.ComparisonTable | None
    artifacts: tuple[RunArtifacts, ...]
    failures: tuple[tuple[str, str], ...]  # (run name, error message)


def run_grid(configs: Sequence[RunConfig], out_dir: Path | str) -> GridResult:
    """Run each config cell; failures are isolated per cell.

    Writes comparison.txt and comparison.jsonl next to the per-run
    directories. Raises only if every cell fails.
    """
    if not configs:
        raise ValueError("grid requires at least one run config")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts: list[RunArtifacts] = []
    failures: list[tuple[str, str]] = []
    for config in configs:
        try:
            artifacts.append(run(config))
        except (StageError, ValueError) as exc:
            failures.append((config.run_name, str(exc)))
    if not artifacts:
        raise StageError("grid", f"all {len(configs)} cells failed: {failures}")
    table = metrics.compare_runs([a.report for a in artifacts])
    text = table.render()
    if failures:
        notes = "".join(f"FAILED {name}: {message}\n" for name, message in failures)
        text = text + "\n" + notes
    (out_dir / "comparison.txt").write_text(text, encoding="utf-8")
    (out_dir / "comparison.jsonl").write_text(table.to_jsonl(), encoding="utf-8")
    return GridResult(table=table, artifacts=tuple(artifacts), failures=tuple(failures))
