"""Command-line entry point.

Subcommands mirror the pipeline stages: ingest, split, select, verify,
parse, evaluate, export-train, plus the fused run and grid commands.
Secrets (API keys) come from environment variables only.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import metrics, pipeline
from .corpus import (
    Dataset,
    IngestError,
    Label,
    SplitSpec,
    attach_evidence,
    ingest_claims,
    serialize_claims,
    serialize_evidence,
    stratified_split,
)
from .export import AdapterConfig, config_for_strategy, emit_adapter_config, export_pairs, write_export_summary
from .gateway import GenerationParams, RenderedPrompt, render_prompt, run_batch
from .selection import Strategy
from .verdicts import DEFAULT_RULES, load_rules, parse_batch

STRATEGY_NAMES = [s.value for s in Strategy]


def _load(claims: str, evidence: str | None) -> Dataset:
    dataset = ingest_claims(claims)
    if evidence:
        dataset = attach_evidence(dataset, evidence)
    return dataset


def _params_from_args(args: argparse.Namespace) -> GenerationParams:
    return GenerationParams(
        temperature=args.temperature,
        top_p=args.top_p,
        max_new_tokens=args.max_new_tokens,
        model_name=args.model,
    )


def _add_generation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--temperature", type=float, default=0.3)
    parser.add_argument("--top-p", dest="top_p", type=float, default=0.9)
    parser.add_argument("--max-new-tokens", dest="max_new_tokens", type=int, default=30)
    parser.add_argument("--model", default="meta-llama/Llama-3.1-8B-Instruct")


def _add_run_flags(parser: argparse.ArgumentParser, single_strategy: bool = True) -> None:
    parser.add_argument("--claims", required=True)
    parser.add_argument("--evidence", required=True)
    parser.add_argument("--out-dir", required=True)
    if single_strategy:
        parser.add_argument("--strategy", required=True, choices=STRATEGY_NAMES)
    else:
        parser.add_argument(
            "--strategies", default=",".join(STRATEGY_NAMES),
            help="comma-separated strategy list",
        )
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--doc-limit", dest="doc_limit", type=int, default=10)
    parser.add_argument("--backend", default="mock",
                        help="mock | replay:<path> | record:<path>[:inner] | http(s) URL")
    parser.add_argument("--embedder", default="stub", help="stub | http(s) URL")
    parser.add_argument("--embedding-model", dest="embedding_model",
                        default="sentence-transformers/all-MiniLM-L6-v2")
    parser.add_argument("--embedding-cache", dest="embedding_cache", default=None)
    parser.add_argument("--concurrency", type=int, default=1)
    parser.add_argument("--failure-threshold", dest="failure_threshold", type=float, default=0.2)
    parser.add_argument("--budget-tokens", dest="budget_tokens", type=int, default=4096)
    parser.add_argument("--rules", dest="rules_path", default=None)
    parser.add_argument("--run-name", dest="run_name", default="run")
    parser.add_argument("--seed", type=int, default=0)
    _add_generation_flags(parser)


def _config_from_args(args: argparse.Namespace, strategy: str, out_dir: str, run_name: str) -> pipeline.RunConfig:
    return pipeline.RunConfig(
        claims_path=args.claims,
        evidence_path=args.evidence,
        out_dir=out_dir,
        strategy=Strategy(strategy),
        k=args.k,
        doc_limit=args.doc_limit,
        backend=args.backend,
        embedder=args.embedder,
        embedding_model=args.embedding_model,
        embedding_cache=args.embedding_cache,
        params=_params_from_args(args),
        concurrency=args.concurrency,
        failure_threshold=args.failure_threshold,
        budget_tokens=args.budget_tokens,
        rules_path=args.rules_path,
        run_name=run_name,
        seed=args.seed,
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    dataset = _load(args.claims, args.evidence)
    labels = {label.to_text(): 0 for label in Label}
    unlabeled = 0
    for claim in dataset.claims:
        if claim.gold_label is None:
            unlabeled += 1
        else:
            labels[claim.gold_label.to_text()] += 1
    evidence_total = sum(len(docs) for docs in dataset.evidence.values())
    print(f"claims: {len(dataset)}")
    print(f"labels: {labels} (unlabeled: {unlabeled})")
    print(f"evidence documents: {evidence_total}")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        serialize_claims(dataset, out / "claims.jsonl")
        serialize_evidence(dataset, out / "evidence.jsonl")
        print(f"normalized copy written to {out}")
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    dataset = _load(args.claims, args.evidence)
    spec = SplitSpec(train_fraction=args.train_fraction, seed=args.seed)
    train, validation = stratified_split(dataset, spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    serialize_claims(train, out / "train.claims.jsonl")
    serialize_claims(validation, out / "validation.claims.jsonl")
    if args.evidence:
        serialize_evidence(train, out / "train.evidence.jsonl")
        serialize_evidence(validation, out / "validation.evidence.jsonl")
    print(f"train: {len(train)}  validation: {len(validation)}  -> {out}")
    return 0


def _build_embedder_from_flags(args: argparse.Namespace):
    if args.embedder == "stub":
        from .embeddings import StubEmbedder

        return StubEmbedder()
    from .embeddings import EmbeddingProviderConfig, HttpEmbedder

    return HttpEmbedder(
        EmbeddingProviderConfig(
            endpoint=args.embedder,
            model_name=args.embedding_model,
            cache_path=Path(args.embedding_cache) if args.embedding_cache else None,
        )
    )


def cmd_select(args: argparse.Namespace) -> int:
    from .selection import select as select_one

    dataset = _load(args.claims, args.evidence)
    strategy = Strategy(args.strategy)
    embedder = (
        _build_embedder_from_flags(args) if strategy is Strategy.TOP_K_SEMANTIC else None
    )
    records = []
    skipped = 0
    for claim in dataset.claims:
        documents = dataset.evidence_for(claim.id)
        if not documents:
            skipped += 1
            continue
        selected = select_one(
            claim, documents, strategy,
            k=args.k, doc_limit=args.doc_limit, embedder=embedder,
        )
        records.append(
            {
                "claim_id": selected.claim_id,
                "strategy": selected.strategy.value,
                "evidence": list(selected.units),
                "scores": [float(x) for x in selected.scores],
                "origins": [list(o) for o in selected.origins],
                "warning": selected.warning,
            }
        )
    with open(args.out, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"selections: {len(records)} written to {args.out} (skipped without evidence: {skipped})")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    dataset = ingest_claims(args.claims)
    by_id = {claim.id: claim for claim in dataset.claims}
    backend = pipeline.build_backend(args.backend)
    params = _params_from_args(args)
    jobs: list[tuple[str, RenderedPrompt]] = []
    with open(args.selections, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            claim = by_id.get(record["claim_id"])
            if claim is None:
                continue
            prompt = render_prompt(claim.text, record["evidence"], budget_tokens=args.budget_tokens)
            jobs.append((claim.id, prompt))
    results = run_batch(jobs, params, backend,
                        concurrency=args.concurrency,
                        failure_threshold=args.failure_threshold)
    with open(args.out, "w", encoding="utf-8") as handle:
        for r in results:
            record = {
                "claim_id": r.claim_id,
                "prompt_sha256": r.prompt_sha256,
                "raw_text": r.raw_text,
                "latency_ms": round(r.latency * 1000.0, 3),
                "backend": r.backend,
                "truncated_evidence": r.truncated_evidence,
                "error": r.error,
                "params": asdict(params),
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"generations: {len(results)} written to {args.out}")
    return 0


def cmd_parse(args: argparse.Namespace) -> int:
    rules = load_rules(args.rules) if args.rules else DEFAULT_RULES
    pairs = []
    with open(args.generations, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            if record.get("error"):
                continue
            pairs.append((record["claim_id"], record["raw_text"]))
    parsed = parse_batch(pairs, rules)
    with open(args.out, "w", encoding="utf-8") as handle:
        for claim_id, verdict in parsed.verdicts:
            record = {
                "claim_id": claim_id,
                "label": verdict.label.to_text(),
                "rule_id": verdict.rule_id,
                "matched_span": list(verdict.matched_span) if verdict.matched_span else None,
                "fallback_used": verdict.fallback_used,
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"verdicts: {len(parsed.verdicts)} written to {args.out} "
          f"(fallback rate: {parsed.fallback_rate:.3f})")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    dataset = ingest_claims(args.claims)
    by_id = {claim.id: claim for claim in dataset.claims}
    gold, predicted = [], []
    with open(args.verdicts, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            claim = by_id.get(record["claim_id"])
            if claim is None or claim.gold_label is None:
                continue
            gold.append(claim.gold_label)
            predicted.append(Label.parse(record["label"]))
    report = metrics.evaluate(gold, predicted, metadata={"run": args.run_name})
    print(metrics.render_report(report), end="")
    if args.out:
        Path(args.out).write_text(
            json.dumps(metrics.report_to_dict(report), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        print(f"report written to {args.out}")
    return 0


def _template_from_file(path: str):
    from .gateway import DEFAULT_TEMPLATE, PromptTemplate

    if not path:
        return DEFAULT_TEMPLATE
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return PromptTemplate(
        preamble=payload["preamble"], body=payload["body"], closing=payload["closing"]
    )


def cmd_export_train(args: argparse.Namespace) -> int:
    config = _config_from_args(args, args.strategy, out_dir="", run_name="export")
    dataset = _load(args.claims, args.evidence)
    embedder = (
        pipeline.build_embedder(config)
        if config.strategy is Strategy.TOP_K_SEMANTIC
        else None
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = export_pairs(
        dataset,
        config.strategy,
        out / "pairs.jsonl",
        template=_template_from_file(args.template_file),
        embedder=embedder,
        k=config.k,
        doc_limit=config.doc_limit,
        budget_tokens=config.budget_tokens,
    )
    write_export_summary(summary, out / "export_summary.json")
    adapter = config_for_strategy(AdapterConfig(base_model=args.model), config.strategy)
    emit_adapter_config(adapter, out / "adapter_config.txt")
    print(f"pairs: {summary.total} written to {summary.path}")
    print(f"label counts: {dict(summary.per_label)}")
    print(f"adapter config written to {out / 'adapter_config.txt'}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args, args.strategy, out_dir=args.out_dir, run_name=args.run_name)
    artifacts = pipeline.run(config)
    print(metrics.render_report(artifacts.report), end="")
    print(f"artifacts in {artifacts.out_dir}")
    return 0


def cmd_grid(args: argparse.Namespace) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    bad = [s for s in strategies if s not in STRATEGY_NAMES]
    if bad:
        raise ValueError(f"unknown strategies: {bad}; choose from {STRATEGY_NAMES}")
    out_dir = Path(args.out_dir)
    configs = [
        _config_from_args(args, name, out_dir=str(out_dir / name), run_name=name)
        for name in strategies
    ]
    result = pipeline.run_grid(configs, out_dir)
    print(result.table.render(), end="")
    for name, message in result.failures:
        print(f"FAILED {name}: {message}")
    print(f"comparison written to {out_dir / 'comparison.txt'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimcheck",
        description="Verify numerical/temporal claims against retrieved evidence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate claim and evidence files")
    p.add_argument("--claims", required=True)
    p.add_argument("--evidence", default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="stratified train/validation split")
    p.add_argument("--claims", required=True)
    p.add_argument("--evidence", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--train-fraction", dest="train_fraction", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("select", help="evidence selection for every claim")
    p.add_argument("--claims", required=True)
    p.add_argument("--evidence", required=True)
    p.add_argument("--strategy", required=True, choices=STRATEGY_NAMES)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--doc-limit", dest="doc_limit", type=int, default=10)
    p.add_argument("--embedder", default="stub", help="stub | http(s) URL")
    p.add_argument("--embedding-model", dest="embedding_model",
                   default="sentence-transformers/all-MiniLM-L6-v2")
    p.add_argument("--embedding-cache", dest="embedding_cache", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("verify", help="generate verdicts for precomputed selections")
    p.add_argument("--claims", required=True)
    p.add_argument("--selections", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--backend", default="mock")
    p.add_argument("--concurrency", type=int, default=1)
    p.add_argument("--failure-threshold", dest="failure_threshold", type=float, default=0.2)
    p.add_argument("--budget-tokens", dest="budget_tokens", type=int, default=4096)
    _add_generation_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("parse", help="normalize raw generations to labels")
    p.add_argument("--generations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rules", default=None)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("evaluate", help="score verdicts against gold labels")
    p.add_argument("--claims", required=True)
    p.add_argument("--verdicts", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--run-name", dest="run_name", default="run")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-train", help="emit prompt-response pairs and adapter config")
    _add_run_flags(p)
    p.add_argument("--template-file", dest="template_file", default=None,
                   help="JSON file with preamble/body/closing overriding the default template")
    p.set_defaults(func=cmd_export_train)

    p = sub.add_parser("run", help="fused ingest->select->verify->parse->evaluate")
    _add_run_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grid", help="run several strategies and compare")
    _add_run_flags(p, single_strategy=False)
    p.set_defaults(func=cmd_grid)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, pipeline.StageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
