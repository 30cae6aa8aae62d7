#!/usr/bin/env python3
# The three evidence granularity strategies side by side: full document,
# top-3 BM25 sentences, top-3 embedding-cosine sentences.

from claimcheck import (
    Claim,
    EvidenceDocument,
    StubEmbedder,
    select_full_document,
    select_top_k_bm25,
    select_top_k_semantic,
)

claim = Claim(id="demo", text="Unemployment fell to 3.5% in 2019.")

documents = [
    EvidenceDocument(
        claim_id="demo",
        rank=1,
        text=(
            "The labor market strengthened through 2019. "
            "Unemployment fell to 3.5% in 2019, a fifty-year low. "
            "Wage growth stayed modest."
        ),
    ),
    EvidenceDocument(
        claim_id="demo",
        rank=2,
        text=(
            "Analysts debated the durability of the expansion. "
            "The jobless rate was 3.5% in December 2019."
        ),
    ),
]

# Full document: the rank-1 retrieved document verbatim.
full = select_full_document(claim, documents)
print("== full_document ==")
print(full.units[0][:80], "...")

# BM25 treats the claim as a query over all sentences of the top documents.
# Scores are Okapi BM25 (k1=1.2, b=0.75) with per-claim corpus statistics.
bm25 = select_top_k_bm25(claim, documents, k=3)
print("\n== top_k_bm25 ==")
for text, score, (doc_rank, position) in zip(bm25.units, bm25.scores, bm25.origins):
    print(f"  score={score:.3f} doc={doc_rank} pos={position}  {text}")

# Semantic selection ranks sentences by cosine similarity of embeddings.
# The stub embedder is deterministic and offline; point an HttpEmbedder at a
# real sentence-encoder service for production runs.
semantic = select_top_k_semantic(claim, documents, StubEmbedder(), k=3)
print("\n== top_k_semantic (stub embedder) ==")
for text, score in zip(semantic.units, semantic.scores):
    print(f"  cosine={score:+.3f}  {text}")

# Selection is deterministic: rerunning returns the identical result.
print("\ndeterministic:", select_top_k_bm25(claim, documents, k=3) == bm25)
