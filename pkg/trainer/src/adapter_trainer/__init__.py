"""adapter_trainer: low-rank adapter fine-tuning for the claim
verification pipeline. Consumes the exported prompt-response pair file
and adapter config verbatim; produces adapter weights in the
conventional serving layout.
"""

from .config import AdapterConfig, ConfigError, load_adapter_config
from .lora import LoraLinear, adapter_state_dict, inject_adapters, save_adapter
from .models import TINY_DEBUG_ID, ByteTokenizer, build_tiny_model, resolve_model
from .pairs import CANONICAL_LABELS, PairsError, PairsReport, load_pairs, validate_pairs
from .training import TrainerError, TrainerManifest, TrainResult, train

__version__ = "0.1.0"
