#!/usr/bin/env python3
# Render the fact-checking prompt, run it through the offline mock
# backend, and normalize the raw generations to labels.

from claimcheck import (
    Claim,
    EvidenceDocument,
    GenerationParams,
    MockBackend,
    parse_batch,
    render_prompt,
    run_batch,
    select_top_k_bm25,
)

claims = [
    Claim(id="a", text="The deficit doubled in 2015."),
    Claim(id="b", text="City spending hit 12 million dollars."),
    Claim(id="c", text="Exports grew 4% last quarter."),
]
evidence = {
    "a": [EvidenceDocument("a", 1, "The deficit doubled in 2015. Audit confirmed it.")],
    "b": [EvidenceDocument("b", 1, "The 12 million figure was debunked by reporters.")],
    "c": [EvidenceDocument("c", 1, "Trade data for the quarter is still provisional.")],
}

# The default template's preamble goes out as the system message; the
# claim/evidence block plus closing question as the user message.
jobs = []
for claim in claims:
    selected = select_top_k_bm25(claim, evidence[claim.id], k=3)
    prompt = render_prompt(claim.text, selected)
    jobs.append((claim.id, prompt))

print("== rendered prompt for claim 'a' ==")
print(jobs[0][1].text)
print()

# Decoding defaults: temperature 0.3, top-p 0.9, max 30 new tokens. The
# mock backend answers from simple evidence rules, so this runs offline.
params = GenerationParams()
results = run_batch(jobs, params, MockBackend(), concurrency=2)
for result in results:
    print(f"{result.claim_id}: raw={result.raw_text!r} backend={result.backend}")

# Free-text answers normalize to the three labels; unmatched text falls
# back to Conflicting with a flag, and the batch reports its fallback rate.
parsed = parse_batch([(r.claim_id, r.raw_text) for r in results])
for claim_id, verdict in parsed.verdicts:
    print(f"{claim_id}: label={verdict.label.to_text()} rule={verdict.rule_id}")
print("fallback rate:", parsed.fallback_rate)
