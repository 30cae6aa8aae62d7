"""Fact-checking prompt construction and chat-completion backends.

The default instruction template is fixed (golden-file tested); the
preamble travels as the system message and the claim/evidence block plus
closing question as the user message. Three backends share one
interface: a chat-completions HTTP endpoint, a rule-based offline mock,
and a record/replay store for byte-identical regression runs.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

from .selection import SelectedEvidence
from .transport import HttpStatusError, TransportError, post_json

EMPTY_EVIDENCE_TEXT = "No evidence available."
DEFAULT_BUDGET_TOKENS = 4096
CHARS_PER_TOKEN = 4  # coarse estimate; avoids a tokenizer dependency


class GenerationError(RuntimeError):
    """Generation failed after retries, or the batch failure rate tripped."""


@dataclass(frozen=True)
class PromptTemplate:
    preamble: str
    body: str  # must contain the [CLAIM] and [EVIDENCE] placeholders
    closing: str

    def __post_init__(self) -> None:
        if "[CLAIM]" not in self.body or "[EVIDENCE]" not in self.body:
            raise ValueError("template body must contain [CLAIM] and [EVIDENCE]")


DEFAULT_TEMPLATE = PromptTemplate(
    preamble=(
        "You are a helpful and concise fact-checking assistant. Given a claim and "
        "supporting evidence, your task is to determine the truthfulness of the claim.\n"
        "Respond strictly with one of the following labels: True, False, or Conflicting."
    ),
    body="Claim: [CLAIM]\nEvidence: [EVIDENCE]",
    closing="Based on the evidence, what is the correct classification?",
)


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.3
    top_p: float = 0.9
    max_new_tokens: int = 30
    model_name: str = "meta-llama/Llama-3.1-8B-Instruct"

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.max_new_tokens < 1:
            raise ValueError(f"max_new_tokens must be >= 1, got {self.max_new_tokens}")


@dataclass(frozen=True)
class RenderedPrompt:
    system: str
    user: str
    truncated_evidence: bool = False
    empty_evidence: bool = False

    @property
    def text(self) -> str:
        """Flat rendering used for hashing, logging, and training export."""
        return self.system + "\n\n" + self.user

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GenerationResult:
    claim_id: str
    raw_text: str  # verbatim backend output, untrimmed
    latency: float  # seconds; 0.0 for in-process deterministic backends
    backend: str
    truncated_evidence: bool = False
    prompt_sha256: str = ""
    error: str | None = None


_PLACEHOLDER = re.compile(r"\[(CLAIM|EVIDENCE)\]")


def _substitute(body: str, claim_text: str, evidence_text: str) -> str:
    # Single pass so placeholder-looking substrings inside the claim or
    # evidence are never re-substituted.
    values = {"CLAIM": claim_text, "EVIDENCE": evidence_text}
    return _PLACEHOLDER.sub(lambda match: values[match.group(1)], body)


def render_prompt(
    claim_text: str,
    evidence: SelectedEvidence | Sequence[str],
    template: PromptTemplate = DEFAULT_TEMPLATE,
    budget_tokens: int = DEFAULT_BUDGET_TOKENS,
) -> RenderedPrompt:
    """Render the instruction prompt for one claim.

    Evidence units are joined by newlines in score order. If the flat
    rendering exceeds budget_tokens * CHARS_PER_TOKEN characters, the
    evidence block is truncated from the end and the result is flagged.
    """
    if not claim_text.strip():
        raise ValueError("claim text is empty")
    units = evidence.units if isinstance(evidence, SelectedEvidence) else tuple(evidence)
    empty = not units
    evidence_text = EMPTY_EVIDENCE_TEXT if empty else "\n".join(units)

    def build(ev_text: str) -> tuple[str, str]:
        user = _substitute(template.body, claim_text, ev_text) + "\n" + template.closing
        return template.preamble, user

    system, user = build(evidence_text)
    truncated = False
    max_chars = budget_tokens * CHARS_PER_TOKEN
    flat_len = len(system) + 2 + len(user)
    if flat_len > max_chars:
        overhead = flat_len - len(evidence_text)
        allowed = max(max_chars - overhead, 0)
        evidence_text = evidence_text[:allowed].rstrip()
        truncated = True
        system, user = build(evidence_text)
    return RenderedPrompt(
        system=system, user=user, truncated_evidence=truncated, empty_evidence=empty
    )


class ChatBackend(Protocol):
    name: str
    in_process: bool

    def complete(self, system: str, user: str, params: GenerationParams) -> str: ...


class MockBackend:
    """Offline rule-based stand-in for an instruct model.

    Rules, applied to the user message: evidence restating the claim
    verbatim (casefolded) answers "True"; evidence containing the token
    "debunked" answers "False"; anything else answers "Conflicting".
    """

    name = "mock"
    in_process = True

    def complete(self, system: str, user: str, params: GenerationParams) -> str:
        claim, evidence = self._extract(user)
        if claim and claim.casefold() in evidence.casefold():
            return "True"
        if "debunked" in evidence.casefold():
            return "False"
        return "Conflicting"

    @staticmethod
    def _extract(user: str) -> tuple[str, str]:
        claim = ""
        match = re.search(r"^Claim: (.*)$", user, flags=re.MULTILINE)
        if match:
            claim = match.group(1).strip()
        evidence = ""
        marker = "\nEvidence: "
        start = user.find(marker)
        if start != -1:
            rest = user[start + len(marker):]
            # Everything up to the closing question line.
            evidence = rest.rsplit("\n", 1)[0] if "\n" in rest else rest
        return claim, evidence


class HttpChatBackend:
    """Chat-completions JSON over HTTP (messages, temperature, top_p, max_tokens)."""

    in_process = False

    def __init__(
        self,
        endpoint: str,
        api_key_env: str = "CHAT_API_KEY",
        timeout: float = 60.0,
        transport=post_json,
        name: str = "http",
    ):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout = timeout
        self._transport = transport
        self.name = name

    def complete(self, system: str, user: str, params: GenerationParams) -> str:
        payload = {
            "model": params.model_name,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_new_tokens,
        }
        headers = None
        api_key = os.environ.get(self.api_key_env, "")
        if api_key:
            headers = {"Authorization": f"Bearer {api_key}"}
        body = self._transport(self.endpoint, payload, timeout=self.timeout, headers=headers)
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise GenerationError(f"malformed chat-completion response: {body!r}") from exc


class RecordReplayBackend:
    """Stores responses keyed by prompt hash for byte-identical replays.

    Store file: one {"prompt_sha256": ..., "text": ...} record per line.
    In record mode an inner backend answers and every response is
    appended; in replay mode a missing hash is an error.
    """

    in_process = True

    def __init__(self, path: Path | str, mode: str = "replay", inner: ChatBackend | None = None):
        if mode not in ("record", "replay"):
            raise ValueError(f"mode must be 'record' or 'replay', got {mode!r}")
        if mode == "record" and inner is None:
            raise ValueError("record mode requires an inner backend")
        self.path = Path(path)
        self.mode = mode
        self.inner = inner
        self.name = f"{mode}:{self.path.name}"
        self._store: dict[str, str] = {}
        if self.path.exists():
            with self.path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    if line.strip():
                        entry = json.loads(line)
                        self._store[entry["prompt_sha256"]] = entry["text"]

    @staticmethod
    def _hash(system: str, user: str) -> str:
        return hashlib.sha256((system + "\n\n" + user).encode("utf-8")).hexdigest()

    def complete(self, system: str, user: str, params: GenerationParams) -> str:
        key = self._hash(system, user)
        if key in self._store:
            return self._store[key]
        if self.mode == "replay":
            raise GenerationError(f"no recorded response for prompt hash {key[:12]}...")
        text = self.inner.complete(system, user, params)
        self._store[key] = text
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps({"prompt_sha256": key, "text": text}, sort_keys=True) + "\n")
        return text


def generate(
    prompt: RenderedPrompt,
    params: GenerationParams,
    backend: ChatBackend,
    claim_id: str = "",
) -> GenerationResult:
    """Run one prompt through a backend.

    Transport-level retrying lives in the transport layer (3 attempts);
    exhausted retries and non-retryable HTTP errors surface here with the
    claim context attached.
    """
    started = time.perf_counter()
    try:
        raw_text = backend.complete(prompt.system, prompt.user, params)
    except (TransportError, HttpStatusError, GenerationError) as exc:
        raise GenerationError(f"generation failed for claim {claim_id!r}: {exc}") from exc
    latency = 0.0 if backend.in_process else time.perf_counter() - started
    return GenerationResult(
        claim_id=claim_id,
        raw_text=raw_text,
        latency=latency,
        backend=backend.name,
        truncated_evidence=prompt.truncated_evidence,
        prompt_sha256=prompt.sha256,
    )


def run_batch(
    jobs: Sequence[tuple[str, RenderedPrompt]],
    params: GenerationParams,
    backend: ChatBackend,
    concurrency: int = 1,
    failure_threshold: float = 0.2,
) -> list[GenerationResult]:
    """Generate for every (claim_id, prompt) job.

    Output order equals input order regardless of completion order;
    per-item failures are captured as results with `error` set. The whole
    batch fails only if the failure rate exceeds failure_threshold.
    """
    if concurrency < 1:
        raise ValueError(f"concurrency must be >= 1, got {concurrency}")
    results: list[GenerationResult | None] = [None] * len(jobs)

    def work(index: int) -> None:
        claim_id, prompt = jobs[index]
        try:
            results[index] = generate(prompt, params, backend, claim_id=claim_id)
        except GenerationError as exc:
            results[index] = GenerationResult(
                claim_id=claim_id,
                raw_text="",
                latency=0.0,
                backend=backend.name,
                truncated_evidence=prompt.truncated_evidence,
                prompt_sha256=prompt.sha256,
                error=str(exc),
            )

    if jobs:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            list(pool.map(work, range(len(jobs))))
    final = [result for result in results if result is not None]
    failures = sum(1 for result in final if result.error is not None)
    if jobs and failures / len(jobs) > failure_threshold:
        raise GenerationError(
            f"{failures}/{len(jobs)} generations failed "
            f"(threshold {failure_threshold:.0%})"
        )
    return final
