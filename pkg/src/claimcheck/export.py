"""Supervised fine-tuning artifacts: prompt-response pair files and the
adapter/training configuration.

Pair file: one {"prompt", "response", "claim_id", "strategy"} JSON record
per line; the response is exactly one of the three canonical label
strings, so every exported response parses back to its gold label.

Adapter config file: flat `key=value` lines, versioned, one key per line
(documented in the README); it round-trips through load_adapter_config
and through the trainer's loader.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

from .corpus import Dataset, Label
from .embeddings import Embedder
from .gateway import DEFAULT_BUDGET_TOKENS, DEFAULT_TEMPLATE, PromptTemplate, render_prompt
from .selection import (
    DEFAULT_DOC_LIMIT,
    DEFAULT_TOP_K,
    Bm25Params,
    SelectedEvidence,
    Strategy,
    select,
)

CONFIG_VERSION = 1
PROJECTION_NAMES = ("query", "key", "value", "output")


class ExportError(ValueError):
    """Raised when export preconditions fail (e.g. unlabeled claims)."""


@dataclass(frozen=True)
class TrainingPair:
    prompt: str
    response: str  # canonical label text
    claim_id: str
    strategy: Strategy


@dataclass(frozen=True)
class ExportSummary:
    path: Path
    total: int
    per_label: Mapping[str, int]
    strategy: Strategy


@dataclass(frozen=True)
class AdapterConfig:
    """Low-rank adapter and schedule hyperparameters."""

    rank: int = 8
    alpha: int = 16
    dropout: float = 0.05
    target_projections: tuple[str, ...] = PROJECTION_NAMES
    epochs: int = 3
    batch_size: int = 2
    gradient_accumulation: int = 4
    mixed_precision: bool = True
    gradient_checkpointing: bool = True
    base_model: str = "meta-llama/Llama-3.1-8B-Instruct"
    evidence_strategy: str = ""

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError(f"invalid field rank: must be >= 1, got {self.rank}")
        if self.alpha < 1:
            raise ValueError(f"invalid field alpha: must be >= 1, got {self.alpha}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"invalid field dropout: must be in [0, 1), got {self.dropout}")
        if self.epochs < 1:
            raise ValueError(f"invalid field epochs: must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"invalid field batch_size: must be >= 1, got {self.batch_size}")
        if self.gradient_accumulation < 1:
            raise ValueError(
                "invalid field gradient_accumulation: must be >= 1, "
                f"got {self.gradient_accumulation}"
            )
        unknown = [p for p in self.target_projections if p not in PROJECTION_NAMES]
        if unknown:
            raise ValueError(f"invalid field target_projections: unknown {unknown}")
        if not self.base_model:
            raise ValueError("invalid field base_model: must be non-empty")


def build_pairs(
    dataset: Dataset,
    strategy: Strategy,
    template: PromptTemplate = DEFAULT_TEMPLATE,
    selections: Mapping[str, SelectedEvidence] | None = None,
    embedder: Embedder | None = None,
    k: int = DEFAULT_TOP_K,
    doc_limit: int = DEFAULT_DOC_LIMIT,
    params: Bm25Params = Bm25Params(),
    budget_tokens: int = DEFAULT_BUDGET_TOKENS,
) -> list[TrainingPair]:
    """Render one prompt-response pair per labeled claim.

    Selections may be precomputed; otherwise they are computed here with
    the given strategy. Unlabeled claims are an error.
    """
    unlabeled = [c.id for c in dataset.claims if c.gold_label is None]
    if unlabeled:
        listed = ", ".join(repr(cid) for cid in unlabeled[:5])
        raise ExportError(f"cannot export unlabeled claims: {listed}")
    pairs: list[TrainingPair] = []
    for claim in dataset.claims:
        if selections is not None and claim.id in selections:
            selected = selections[claim.id]
        else:
            selected = select(
                claim,
                dataset.evidence_for(claim.id),
                strategy,
                k=k,
                params=params,
                doc_limit=doc_limit,
                embedder=embedder,
            )
        prompt = render_prompt(claim.text, selected, template, budget_tokens=budget_tokens)
        pairs.append(
            TrainingPair(
                prompt=prompt.text,
                response=claim.gold_label.to_text(),
                claim_id=claim.id,
                strategy=strategy,
            )
        )
    return pairs


def export_pairs(
    dataset: Dataset,
    strategy: Strategy,
    destination: Path | str,
    template: PromptTemplate = DEFAULT_TEMPLATE,
    selections: Mapping[str, SelectedEvidence] | None = None,
    embedder: Embedder | None = None,
    k: int = DEFAULT_TOP_K,
    doc_limit: int = DEFAULT_DOC_LIMIT,
    params: Bm25Params = Bm25Params(),
    budget_tokens: int = DEFAULT_BUDGET_TOKENS,
) -> ExportSummary:
    """Write the pair file and return per-label counts.

    Content is deterministic for fixed inputs: records follow dataset
    order and serialization is key-sorted.
    """
    destination = Path(destination)
    pairs = build_pairs(
        dataset,
        strategy,
        template=template,
        selections=selections,
        embedder=embedder,
        k=k,
        doc_limit=doc_limit,
        params=params,
        budget_tokens=budget_tokens,
    )
    counts = {label.to_text(): 0 for label in Label}
    with destination.open("w", encoding="utf-8") as handle:
        for pair in pairs:
            counts[pair.response] += 1
            record = {
                "prompt": pair.prompt,
                "response": pair.response,
                "claim_id": pair.claim_id,
                "strategy": pair.strategy.value,
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return ExportSummary(
        path=destination, total=len(pairs), per_label=counts, strategy=strategy
    )


def write_export_summary(summary: ExportSummary, destination: Path | str) -> None:
    destination = Path(destination)
    payload = {
        "pairs_file": summary.path.name,
        "total": summary.total,
        "per_label": dict(summary.per_label),
        "strategy": summary.strategy.value,
    }
    destination.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


_CONFIG_KEYS = (
    "base_model",
    "rank",
    "alpha",
    "dropout",
    "target_projections",
    "epochs",
    "batch_size",
    "gradient_accumulation",
    "mixed_precision",
    "gradient_checkpointing",
    "evidence_strategy",
)


def emit_adapter_config(config: AdapterConfig, destination: Path | str) -> Path:
    """Serialize the adapter config with every field explicit."""
    destination = Path(destination)
    lines = [f"version={CONFIG_VERSION}"]
    for key in _CONFIG_KEYS:
        value = getattr(config, key)
        if key == "target_projections":
            value = ",".join(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key}={value}")
    destination.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return destination


def load_adapter_config(path: Path | str) -> AdapterConfig:
    """Parse an emitted config file back into an AdapterConfig."""
    path = Path(path)
    values: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path.name}:{line_no}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    version = values.pop("version", None)
    if version != str(CONFIG_VERSION):
        raise ValueError(f"{path.name}: unsupported config version {version!r}")
    missing = [key for key in _CONFIG_KEYS if key not in values]
    if missing:
        raise ValueError(f"{path.name}: missing fields: {', '.join(missing)}")
    return AdapterConfig(
        rank=int(values["rank"]),
        alpha=int(values["alpha"]),
        dropout=float(values["dropout"]),
        target_projections=tuple(
            p for p in values["target_projections"].split(",") if p
        ),
        epochs=int(values["epochs"]),
        batch_size=int(values["batch_size"]),
        gradient_accumulation=int(values["gradient_accumulation"]),
        mixed_precision=values["mixed_precision"] == "true",
        gradient_checkpointing=values["gradient_checkpointing"] == "true",
        base_model=values["base_model"],
        evidence_strategy=values["evidence_strategy"],
    )


def config_for_strategy(config: AdapterConfig, strategy: Strategy) -> AdapterConfig:
    """Stamp the evidence strategy an export was built with into the config."""
    return replace(config, evidence_strategy=strategy.value)
