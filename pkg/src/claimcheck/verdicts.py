"""Normalize free-text model output to one of the three verdict labels.

Matching is case-insensitive on word boundaries and scans left to right:
the earliest-starting match wins, the longest pattern wins among matches
at the same position, and rule priority breaks exact ties. Ambiguity
phrases ("partially true", "half false", ...) map to Conflicting and,
because they start earlier than the bare label they contain, always
shadow it. Text matching no rule at all falls back to Conflicting with
the fallback flag set, so the parse is total over strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Label


@dataclass(frozen=True)
class ParseRule:
    pattern: str  # literal phrase; internal spaces match any whitespace run
    target: Label
    priority: int  # lower wins exact (start, length) ties

    @property
    def rule_id(self) -> str:
        return self.pattern.replace(" ", "_")

    def compiled(self) -> re.Pattern:
        words = [re.escape(word) for word in self.pattern.split()]
        return re.compile(r"\b" + r"\s+".join(words) + r"\b", re.IGNORECASE)


_AMBIGUOUS = (
    "partially true", "partially false", "half true", "half false",
    "somewhat true", "somewhat false", "mostly true", "mostly false",
    "mixture", "mixed",
)

DEFAULT_RULES: tuple[ParseRule, ...] = tuple(
    [ParseRule(pattern=phrase, target=Label.CONFLICTING, priority=10) for phrase in _AMBIGUOUS]
    + [
        ParseRule(pattern="true", target=Label.TRUE, priority=20),
        ParseRule(pattern="false", target=Label.FALSE, priority=20),
        ParseRule(pattern="conflicting", target=Label.CONFLICTING, priority=20),
    ]
)

FALLBACK_RULE_ID = "fallback"


@dataclass(frozen=True)
class ParsedVerdict:
    label: Label
    matched_span: tuple[int, int] | None
    rule_id: str
    fallback_used: bool


def parse_verdict(raw_text: str, rules: Sequence[ParseRule] = DEFAULT_RULES) -> ParsedVerdict:
    """Extract the first valid label from raw model output (total function)."""
    if not rules:
        raise ValueError("rules must be nonempty")
    best: tuple[int, int, int, int] | None = None  # (start, -length, priority, rule index)
    best_rule: ParseRule | None = None
    best_span: tuple[int, int] | None = None
    for index, rule in enumerate(rules):
        match = rule.compiled().search(raw_text)
        if match is None:
            continue
        key = (match.start(), -(match.end() - match.start()), rule.priority, index)
        if best is None or key < best:
            best = key
            best_rule = rule
            best_span = (match.start(), match.end())
    if best_rule is None:
        return ParsedVerdict(
            label=Label.CONFLICTING,
            matched_span=None,
            rule_id=FALLBACK_RULE_ID,
            fallback_used=True,
        )
    return ParsedVerdict(
        label=best_rule.target,
        matched_span=best_span,
        rule_id=best_rule.rule_id,
        fallback_used=False,
    )


@dataclass(frozen=True)
class BatchParse:
    verdicts: tuple[tuple[str, ParsedVerdict], ...]  # (claim_id, verdict), input order
    fallback_rate: float


def parse_batch(
    results: Sequence[tuple[str, str]], rules: Sequence[ParseRule] = DEFAULT_RULES
) -> BatchParse:
    """Parse (claim_id, raw_text) pairs, preserving order, reporting fallback rate."""
    verdicts = tuple((claim_id, parse_verdict(raw, rules)) for claim_id, raw in results)
    fallbacks = sum(1 for _, verdict in verdicts if verdict.fallback_used)
    rate = fallbacks / len(verdicts) if verdicts else 0.0
    return BatchParse(verdicts=verdicts, fallback_rate=rate)


def load_rules(path: Path | str) -> tuple[ParseRule, ...]:
    """Load rules from a plain config file.

    One rule per line: `priority target phrase...`, e.g.
    `10 conflicting partially true`. Blank lines and lines starting
    with '#' are skipped.
    """
    path = Path(path)
    rules: list[ParseRule] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split(None, 2)
            if len(parts) != 3:
                raise ValueError(
                    f"{path.name}:{line_no}: expected 'priority target phrase', got {stripped!r}"
                )
            priority_text, target_text, phrase = parts
            try:
                priority = int(priority_text)
            except ValueError as exc:
                raise ValueError(f"{path.name}:{line_no}: bad priority {priority_text!r}") from exc
            target = Label.parse(target_text)
            rules.append(ParseRule(pattern=phrase, target=target, priority=priority))
    if not rules:
        raise ValueError(f"{path.name}: no rules found")
    return tuple(rules)
