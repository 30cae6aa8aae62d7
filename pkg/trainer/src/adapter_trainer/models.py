"""Base-model and tokenizer resolution.

Two sources:
* "tiny-debug" — a small randomly initialized causal model with a
  byte-level tokenizer, built in process with a fixed seed. No downloads,
  CPU-friendly; used by CI smoke runs.
* anything else — a Hugging Face model id or local path, loaded through
  AutoModelForCausalLM/AutoTokenizer (weights must be available locally
  or via network).
"""

from __future__ import annotations

from typing import Protocol

import torch

TINY_DEBUG_ID = "tiny-debug"


class Tokenizer(Protocol):
    pad_id: int
    bos_id: int
    eos_id: int

    def encode(self, text: str) -> list[int]: ...


class ByteTokenizer:
    """UTF-8 bytes as token ids; 256=pad, 257=bos, 258=eos."""

    vocab_size = 259
    pad_id = 256
    bos_id = 257
    eos_id = 258

    def encode(self, text: str) -> list[int]:
        return list(text.encode("utf-8"))


class HfTokenizerAdapter:
    """Adapts a Hugging Face tokenizer to the small interface used here."""

    def __init__(self, tokenizer):
        self.tokenizer = tokenizer
        if tokenizer.pad_token_id is None:
            tokenizer.pad_token = tokenizer.eos_token
        self.pad_id = tokenizer.pad_token_id
        self.bos_id = tokenizer.bos_token_id
        self.eos_id = tokenizer.eos_token_id

    def encode(self, text: str) -> list[int]:
        return self.tokenizer.encode(text, add_special_tokens=False)


def build_tiny_model(seed: int = 0):
    from transformers import LlamaConfig, LlamaForCausalLM

    tokenizer = ByteTokenizer()
    config = LlamaConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=64,
        intermediate_size=128,
        num_hidden_layers=2,
        num_attention_heads=2,
        num_key_value_heads=2,
        max_position_embeddings=1024,
        pad_token_id=tokenizer.pad_id,
        bos_token_id=tokenizer.bos_id,
        eos_token_id=tokenizer.eos_id,
    )
    torch.manual_seed(seed)
    model = LlamaForCausalLM(config)
    return model, tokenizer


def resolve_model(base_model: str):
    if base_model == TINY_DEBUG_ID:
        return build_tiny_model()
    from transformers import AutoModelForCausalLM, AutoTokenizer

    model = AutoModelForCausalLM.from_pretrained(base_model)
    tokenizer = HfTokenizerAdapter(AutoTokenizer.from_pretrained(base_model))
    return model, tokenizer
