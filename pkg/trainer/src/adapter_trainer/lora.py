"""Low-rank adapter injection and serialization.

Target linear layers are wrapped in place: the frozen base projection
plus a trainable rank-r update B @ A scaled by alpha/r, with dropout on
the adapter input. A is Kaiming-initialized, B starts at zero so
training begins exactly at the base model. Weights serialize to the
conventional adapter layout (adapter_model.safetensors plus
adapter_config.json with LORA fields) so common serving stacks can load
them directly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import torch
from safetensors.torch import save_file
from torch import nn

from .config import AdapterConfig


class LoraLinear(nn.Module):
    def __init__(self, base: nn.Linear, rank: int, alpha: int, dropout: float):
        super().__init__()
        self.base = base
        self.lora_A = nn.Linear(base.in_features, rank, bias=False)
        self.lora_B = nn.Linear(rank, base.out_features, bias=False)
        nn.init.kaiming_uniform_(self.lora_A.weight, a=math.sqrt(5))
        nn.init.zeros_(self.lora_B.weight)
        self.lora_dropout = nn.Dropout(dropout)
        self.scaling = alpha / rank

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.base(x) + self.lora_B(self.lora_A(self.lora_dropout(x))) * self.scaling


def inject_adapters(model: nn.Module, config: AdapterConfig) -> list[str]:
    """Freeze the model and wrap every target projection; returns the paths wrapped."""
    for parameter in model.parameters():
        parameter.requires_grad_(False)
    targets = set(config.target_modules)
    wrapped: list[str] = []
    for path, module in list(model.named_modules()):
        leaf = path.rsplit(".", 1)[-1]
        if leaf not in targets or not isinstance(module, nn.Linear):
            continue
        parent_path, _, attr = path.rpartition(".")
        parent = model.get_submodule(parent_path) if parent_path else model
        setattr(parent, attr, LoraLinear(module, config.rank, config.alpha, config.dropout))
        wrapped.append(path)
    if not wrapped:
        raise ValueError(f"no modules matched target projections {config.target_modules}")
    return wrapped


def adapter_parameters(model: nn.Module):
    return [p for p in model.parameters() if p.requires_grad]


def adapter_state_dict(model: nn.Module) -> dict[str, torch.Tensor]:
    """Adapter weights only, keyed in the conventional serving layout."""
    state: dict[str, torch.Tensor] = {}
    for path, module in model.named_modules():
        if isinstance(module, LoraLinear):
            prefix = f"base_model.model.{path}"
            state[f"{prefix}.lora_A.weight"] = module.lora_A.weight.detach().cpu()
            state[f"{prefix}.lora_B.weight"] = module.lora_B.weight.detach().cpu()
    return state


def save_adapter(model: nn.Module, config: AdapterConfig, output_dir: Path) -> Path:
    output_dir.mkdir(parents=True, exist_ok=True)
    weights_path = output_dir / "adapter_model.safetensors"
    save_file(adapter_state_dict(model), str(weights_path))
    adapter_config = {
        "peft_type": "LORA",
        "task_type": "CAUSAL_LM",
        "r": config.rank,
        "lora_alpha": config.alpha,
        "lora_dropout": config.dropout,
        "target_modules": list(config.target_modules),
        "base_model_name_or_path": config.base_model,
        "bias": "none",
        "fan_in_fan_out": False,
        "inference_mode": True,
    }
    (output_dir / "adapter_config.json").write_text(
        json.dumps(adapter_config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return weights_path
