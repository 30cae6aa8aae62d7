"""Adapter fine-tuning on exported prompt-response pairs.

Every example is `prompt + response` as one causal sequence with the
loss masked to the response tokens (plus end-of-sequence), so
supervision covers exactly the label the pair carries. The schedule
(epochs, batch size, gradient accumulation, mixed precision, gradient
checkpointing) comes from the exported adapter config; the manifest adds
run-local knobs (paths, learning rate, optional step cap and eval
holdout).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .config import ConfigError, load_adapter_config
from .lora import adapter_parameters, inject_adapters, save_adapter
from .models import Tokenizer, resolve_model
from .pairs import PairsError, PairsReport, TrainingPair, load_pairs

# Not taken from any reported setup: conventional starting point for
# rank-8 adapters; override per run in the manifest.
DEFAULT_LEARNING_RATE = 2e-4


class TrainerError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainerManifest:
    pairs_path: str
    adapter_config_path: str
    output_dir: str
    max_steps_override: int | None = None
    eval_fraction: float | None = None
    learning_rate: float = DEFAULT_LEARNING_RATE
    base_model_override: str | None = None
    max_seq_len: int = 1024

    def __post_init__(self) -> None:
        if self.max_steps_override is not None and self.max_steps_override < 0:
            raise ValueError("max_steps_override must be >= 0")
        if self.eval_fraction is not None and not 0.0 < self.eval_fraction < 1.0:
            raise ValueError("eval_fraction must be in (0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_seq_len < 8:
            raise ValueError("max_seq_len must be >= 8")

    @classmethod
    def load(cls, path: Path | str) -> "TrainerManifest":
        path = Path(path)
        if not path.exists():
            raise TrainerError(f"manifest not found: {path}")
        payload = json.loads(path.read_text(encoding="utf-8"))
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise TrainerError(f"{path.name}: unknown manifest fields: {sorted(unknown)}")
        missing = {"pairs_path", "adapter_config_path", "output_dir"} - set(payload)
        if missing:
            raise TrainerError(f"{path.name}: missing manifest fields: {sorted(missing)}")
        return cls(**payload)


@dataclass(frozen=True)
class TrainResult:
    output_dir: Path
    steps: int
    initial_loss: float | None
    final_loss: float | None
    pairs_report: PairsReport
    dry_run: bool


def _encode_pair(pair: TrainingPair, tokenizer: Tokenizer, max_seq_len: int):
    prompt_ids = tokenizer.encode(pair.prompt)
    response_ids = tokenizer.encode(pair.response) + [tokenizer.eos_id]
    # Keep the response and the prompt tail (closest to the question) when
    # the sequence would overflow.
    budget = max_seq_len - len(response_ids) - 1
    if budget < 1:
        raise TrainerError(
            f"max_seq_len {max_seq_len} too small for response of pair {pair.claim_id!r}"
        )
    prompt_ids = prompt_ids[-budget:]
    ids = [tokenizer.bos_id] + prompt_ids + response_ids
    labels = [-100] * (1 + len(prompt_ids)) + list(response_ids)
    return ids, labels


def _batches(encoded, batch_size: int, pad_id: int, device):
    for start in range(0, len(encoded), batch_size):
        chunk = encoded[start : start + batch_size]
        width = max(len(ids) for ids, _ in chunk)
        input_ids = torch.full((len(chunk), width), pad_id, dtype=torch.long)
        labels = torch.full((len(chunk), width), -100, dtype=torch.long)
        attention = torch.zeros((len(chunk), width), dtype=torch.long)
        for row, (ids, labs) in enumerate(chunk):
            input_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
            labels[row, : len(labs)] = torch.tensor(labs, dtype=torch.long)
            attention[row, : len(ids)] = 1
        yield (
            input_ids.to(device),
            attention.to(device),
            labels.to(device),
        )


@torch.no_grad()
def _mean_loss(model: nn.Module, encoded, batch_size: int, pad_id: int, device) -> float:
    model.eval()
    losses: list[float] = []
    for input_ids, attention, labels in _batches(encoded, batch_size, pad_id, device):
        out = model(input_ids=input_ids, attention_mask=attention, labels=labels)
        losses.append(float(out.loss.detach()))
    model.train()
    return sum(losses) / len(losses)


def train(manifest: TrainerManifest) -> TrainResult:
    """Validate inputs, fine-tune adapters, and write the artifact set.

    Outputs under manifest.output_dir:
        adapter_model.safetensors, adapter_config.json  (skipped on dry run)
        training_log.jsonl   one record per optimizer step plus eval records
        provenance.json      echoed config + data histogram + losses
    """
    # Everything must parse before any training step.
    try:
        config = load_adapter_config(manifest.adapter_config_path)
    except ConfigError as exc:
        raise TrainerError(str(exc)) from exc
    try:
        report, pairs = load_pairs(manifest.pairs_path)
    except PairsError as exc:
        raise TrainerError(str(exc)) from exc
    if report.rejects:
        line, reason = report.rejects[0]
        raise TrainerError(
            f"pair file has {len(report.rejects)} rejected records; "
            f"first at line {line}: {reason}"
        )
    if not pairs:
        raise TrainerError("pair file contains no training pairs")

    base_model = manifest.base_model_override or config.base_model
    output_dir = Path(manifest.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    dry_run = manifest.max_steps_override == 0

    device = torch.device("cuda" if torch.cuda.is_available() else "cpu")
    use_amp = config.mixed_precision and device.type == "cuda"

    provenance = {
        "rank": config.rank,
        "alpha": config.alpha,
        "dropout": config.dropout,
        "target_projections": list(config.target_projections),
        "target_modules": list(config.target_modules),
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "gradient_accumulation": config.gradient_accumulation,
        "mixed_precision_requested": config.mixed_precision,
        "mixed_precision_applied": use_amp,
        "gradient_checkpointing": config.gradient_checkpointing,
        "base_model": base_model,
        "base_model_from_config": config.base_model,
        "evidence_strategy": config.evidence_strategy,
        "learning_rate": manifest.learning_rate,
        "max_steps_override": manifest.max_steps_override,
        "eval_fraction": manifest.eval_fraction,
        "pairs_path": str(manifest.pairs_path),
        "adapter_config_path": str(manifest.adapter_config_path),
        "pairs_total": report.total,
        "pairs_per_label": dict(report.per_label),
        "device": device.type,
        "dry_run": dry_run,
    }

    if dry_run:
        provenance.update({"steps": 0, "initial_loss": None, "final_loss": None})
        (output_dir / "provenance.json").write_text(
            json.dumps(provenance, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return TrainResult(
            output_dir=output_dir,
            steps=0,
            initial_loss=None,
            final_loss=None,
            pairs_report=report,
            dry_run=True,
        )

    model, tokenizer = resolve_model(base_model)
    model.to(device)
    inject_adapters(model, config)
    if config.gradient_checkpointing:
        model.config.use_cache = False
        model.gradient_checkpointing_enable()
        if hasattr(model, "enable_input_require_grads"):
            model.enable_input_require_grads()

    if manifest.eval_fraction:
        holdout = max(1, math.ceil(manifest.eval_fraction * len(pairs)))
        eval_pairs = pairs[-holdout:]
        train_pairs = pairs[:-holdout] or eval_pairs
    else:
        eval_pairs = pairs
        train_pairs = pairs
    encoded_train = [_encode_pair(p, tokenizer, manifest.max_seq_len) for p in train_pairs]
    encoded_eval = [_encode_pair(p, tokenizer, manifest.max_seq_len) for p in eval_pairs]

    optimizer = torch.optim.AdamW(adapter_parameters(model), lr=manifest.learning_rate)
    scaler = torch.amp.GradScaler(enabled=use_amp)
    log_path = output_dir / "training_log.jsonl"
    steps = 0
    step_cap = manifest.max_steps_override  # None means no cap

    try:
        with log_path.open("w", encoding="utf-8") as log:
            initial_loss = _mean_loss(
                model, encoded_eval, config.batch_size, tokenizer.pad_id, device
            )
            log.write(json.dumps({"event": "initial_eval", "loss": initial_loss}) + "\n")

            model.train()
            done = False
            for epoch in range(config.epochs):
                if done:
                    break
                accumulated = 0
                pending = 0.0
                optimizer.zero_grad()
                for input_ids, attention, labels in _batches(
                    encoded_train, config.batch_size, tokenizer.pad_id, device
                ):
                    with torch.autocast(device_type=device.type, enabled=use_amp):
                        out = model(
                            input_ids=input_ids, attention_mask=attention, labels=labels
                        )
                        loss = out.loss / config.gradient_accumulation
                    scaler.scale(loss).backward()
                    accumulated += 1
                    pending += float(out.loss.detach())
                    if accumulated == config.gradient_accumulation:
                        scaler.step(optimizer)
                        scaler.update()
                        optimizer.zero_grad()
                        steps += 1
                        log.write(
                            json.dumps(
                                {
                                    "event": "step",
                                    "epoch": epoch,
                                    "step": steps,
                                    "loss": pending / accumulated,
                                }
                            )
                            + "\n"
                        )
                        accumulated = 0
                        pending = 0.0
                        if step_cap is not None and steps >= step_cap:
                            done = True
                            break
                if accumulated and not done:
                    # Flush the trailing partial accumulation window.
                    scaler.step(optimizer)
                    scaler.update()
                    optimizer.zero_grad()
                    steps += 1
                    log.write(
                        json.dumps(
                            {
                                "event": "step",
                                "epoch": epoch,
                                "step": steps,
                                "loss": pending / accumulated,
                            }
                        )
                        + "\n"
                    )
                    if step_cap is not None and steps >= step_cap:
                        done = True

            final_loss = _mean_loss(
                model, encoded_eval, config.batch_size, tokenizer.pad_id, device
            )
            log.write(json.dumps({"event": "final_eval", "loss": final_loss}) + "\n")
    except torch.cuda.OutOfMemoryError as exc:
        raise TrainerError(
            "out of memory during training; enable gradient_checkpointing in the "
            "adapter config (and reduce batch_size) and retry"
        ) from exc

    save_adapter(model, config, output_dir)
    provenance.update(
        {"steps": steps, "initial_loss": initial_loss, "final_loss": final_loss}
    )
    (output_dir / "provenance.json").write_text(
        json.dumps(provenance, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return TrainResult(
        output_dir=output_dir,
        steps=steps,
        initial_loss=initial_loss,
        final_loss=final_loss,
        pairs_report=report,
        dry_run=False,
    )
