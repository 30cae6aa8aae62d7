"""Loader for the exported adapter-config file.

The file is flat `key=value` lines, versioned; this loader is the
consuming side of the documented format and must stay byte-compatible
with the exporter.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

CONFIG_VERSION = 1

PROJECTION_TO_MODULE = {
    "query": "q_proj",
    "key": "k_proj",
    "value": "v_proj",
    "output": "o_proj",
}


class ConfigError(ValueError):
    """Adapter-config file is missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class AdapterConfig:
    rank: int
    alpha: int
    dropout: float
    target_projections: tuple[str, ...]
    epochs: int
    batch_size: int
    gradient_accumulation: int
    mixed_precision: bool
    gradient_checkpointing: bool
    base_model: str
    evidence_strategy: str

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ConfigError(f"rank must be >= 1, got {self.rank}")
        if self.alpha < 1:
            raise ConfigError(f"alpha must be >= 1, got {self.alpha}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.gradient_accumulation < 1:
            raise ConfigError(
                f"gradient_accumulation must be >= 1, got {self.gradient_accumulation}"
            )
        unknown = [p for p in self.target_projections if p not in PROJECTION_TO_MODULE]
        if unknown:
            raise ConfigError(f"unknown target projections: {unknown}")
        if not self.target_projections:
            raise ConfigError("target_projections must be non-empty")

    @property
    def target_modules(self) -> tuple[str, ...]:
        """Attention submodule names the projections map onto."""
        return tuple(PROJECTION_TO_MODULE[p] for p in self.target_projections)

    @property
    def scaling(self) -> float:
        return self.alpha / self.rank


def load_adapter_config(path: Path | str) -> AdapterConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"adapter config not found: {path}")
    values: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path.name}:{line_no}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    if values.get("version") != str(CONFIG_VERSION):
        raise ConfigError(f"{path.name}: unsupported config version {values.get('version')!r}")
    required = (
        "base_model", "rank", "alpha", "dropout", "target_projections", "epochs",
        "batch_size", "gradient_accumulation", "mixed_precision",
        "gradient_checkpointing", "evidence_strategy",
    )
    missing = [key for key in required if key not in values]
    if missing:
        raise ConfigError(f"{path.name}: missing fields: {', '.join(missing)}")
    try:
        return AdapterConfig(
            rank=int(values["rank"]),
            alpha=int(values["alpha"]),
            dropout=float(values["dropout"]),
            target_projections=tuple(p for p in values["target_projections"].split(",") if p),
            epochs=int(values["epochs"]),
            batch_size=int(values["batch_size"]),
            gradient_accumulation=int(values["gradient_accumulation"]),
            mixed_precision=values["mixed_precision"] == "true",
            gradient_checkpointing=values["gradient_checkpointing"] == "true",
            base_model=values["base_model"],
            evidence_strategy=values["evidence_strategy"],
        )
    except ValueError as exc:
        raise ConfigError(f"{path.name}: {exc}") from exc
