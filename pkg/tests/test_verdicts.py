from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from claimcheck.corpus import Label
from claimcheck.verdicts import (
    DEFAULT_RULES,
    FALLBACK_RULE_ID,
    ParseRule,
    load_rules,
    parse_batch,
    parse_verdict,
)


def load_corpus(data_dir):
    entries = []
    with (data_dir / "parser_corpus.jsonl").open("r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                entries.append(json.loads(line))
    return entries


def test_corpus_has_at_least_twenty_entries(data_dir):
    assert len(load_corpus(data_dir)) >= 20


def test_hand_labeled_corpus_parses_exactly(data_dir):
    for entry in load_corpus(data_dir):
        verdict = parse_verdict(entry["raw"])
        assert verdict.label is Label.parse(entry["label"]), entry["raw"]
        assert verdict.fallback_used == entry["fallback"], entry["raw"]


@pytest.mark.parametrize(
    "raw", ["partially true", "half false", "somewhat true, but the date is wrong"]
)
def test_ambiguous_phrases_map_to_conflicting(raw):
    assert parse_verdict(raw).label is Label.CONFLICTING


def test_leading_canonical_label_wins():
    verdict = parse_verdict("False. The evidence clearly refutes the figure.")
    assert verdict.label is Label.FALSE
    assert verdict.matched_span == (0, 5)
    assert not verdict.fallback_used


def test_half_false_never_parses_as_false():
    for raw in ("half false", "Half False!", "It is half false.", "HALF   FALSE"):
        verdict = parse_verdict(raw)
        assert verdict.label is Label.CONFLICTING, raw
        assert verdict.rule_id == "half_false"


def test_case_insensitive_both_forms():
    assert parse_verdict("The claim is True").label is Label.TRUE
    assert parse_verdict("true").label is Label.TRUE


def test_idempotence_of_canonical_outputs():
    for label in Label:
        verdict = parse_verdict(label.to_text())
        assert verdict.label is label
        assert not verdict.fallback_used


def test_fallback_on_unmatched_text():
    verdict = parse_verdict("The numbers do not add up.")
    assert verdict.label is Label.CONFLICTING
    assert verdict.fallback_used
    assert verdict.rule_id == FALLBACK_RULE_ID
    assert verdict.matched_span is None


def test_earliest_match_wins_across_rules():
    # "true" appears before "false" -> True, even though "false" also matches.
    assert parse_verdict("true then false").label is Label.TRUE
    assert parse_verdict("false then true").label is Label.FALSE


def test_word_boundaries_respected():
    assert parse_verdict("falsehood untrue construe").fallback_used
    assert parse_verdict("virtue").fallback_used


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_totality_every_string_parses(raw):
    verdict = parse_verdict(raw)
    assert verdict.label in (Label.TRUE, Label.FALSE, Label.CONFLICTING)
    assert verdict.fallback_used == (verdict.matched_span is None)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="halfsomewhat turefc ", max_size=60))
def test_longest_match_shadows_bare_labels(raw):
    # Wherever an ambiguity phrase matches, its span must not be reported
    # as a bare-label match at the same start.
    verdict = parse_verdict(raw)
    if verdict.matched_span is None:
        return
    start, end = verdict.matched_span
    matched_text = raw[start:end].lower()
    if matched_text.startswith(("half", "somewhat", "partially", "mostly")):
        assert verdict.label is Label.CONFLICTING


def test_parse_batch_order_and_fallback_rate():
    results = [("a", "True"), ("b", ""), ("c", "half false"), ("d", "strange output")]
    parsed = parse_batch(results)
    assert [cid for cid, _ in parsed.verdicts] == ["a", "b", "c", "d"]
    assert parsed.verdicts[0][1].label is Label.TRUE
    assert parsed.fallback_rate == pytest.approx(0.5)


def test_parse_batch_all_empty_all_fallback():
    parsed = parse_batch([(f"c{i}", "") for i in range(4)])
    assert all(v.label is Label.CONFLICTING for _, v in parsed.verdicts)
    assert all(v.fallback_used for _, v in parsed.verdicts)
    assert parsed.fallback_rate == 1.0


def test_parse_batch_empty_input():
    parsed = parse_batch([])
    assert parsed.verdicts == ()
    assert parsed.fallback_rate == 0.0


def test_rules_must_be_nonempty():
    with pytest.raises(ValueError):
        parse_verdict("anything", rules=())


def test_priority_breaks_exact_ties():
    rules = (
        ParseRule(pattern="maybe", target=Label.TRUE, priority=5),
        ParseRule(pattern="maybe", target=Label.FALSE, priority=1),
    )
    assert parse_verdict("maybe so", rules).label is Label.FALSE


def test_load_rules_round_trip(tmp_path):
    path = tmp_path / "rules.txt"
    path.write_text(
        "# ambiguity first\n"
        "10 Conflicting partially true\n"
        "20 True true\n"
        "20 False false\n"
        "20 Conflicting conflicting\n",
        encoding="utf-8",
    )
    rules = load_rules(path)
    assert len(rules) == 4
    assert parse_verdict("partially true", rules).label is Label.CONFLICTING
    assert parse_verdict("true", rules).label is Label.TRUE


def test_load_rules_rejects_malformed_line(tmp_path):
    path = tmp_path / "rules.txt"
    path.write_text("10 Conflicting\n", encoding="utf-8")
    with pytest.raises(ValueError, match="rules.txt:1"):
        load_rules(path)


def test_custom_rules_can_remap_labels(tmp_path):
    path = tmp_path / "rules.txt"
    path.write_text("5 False debunked\n20 True true\n20 False false\n", encoding="utf-8")
    rules = load_rules(path)
    assert parse_verdict("the story was debunked", rules).label is Label.FALSE


def test_default_rules_cover_canonical_and_ambiguous():
    patterns = {rule.pattern for rule in DEFAULT_RULES}
    assert {"true", "false", "conflicting"} <= patterns
    assert {"partially true", "half false", "somewhat true"} <= patterns
