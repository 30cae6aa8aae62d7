"""claimcheck: verify numerical and temporal claims against retrieved evidence.

The library covers the full batch pipeline: claim/evidence ingestion,
evidence selection (full document, top-k BM25 sentences, top-k
embedding-cosine sentences), instruction prompting of a chat-completion
backend, verdict normalization, macro-F1 evaluation, and fine-tuning
data export.
"""

from .corpus import (
    Claim,
    Dataset,
    EvidenceDocument,
    IngestError,
    Label,
    SplitSpec,
    attach_evidence,
    ingest_claims,
    serialize_claims,
    serialize_evidence,
    stratified_split,
)
from .embeddings import (
    Embedder,
    EmbeddingError,
    EmbeddingProviderConfig,
    HttpEmbedder,
    StubEmbedder,
    cosine_similarity,
)
from .export import AdapterConfig, ExportSummary, TrainingPair, emit_adapter_config, export_pairs, load_adapter_config
from .gateway import (
    DEFAULT_TEMPLATE,
    GenerationError,
    GenerationParams,
    GenerationResult,
    HttpChatBackend,
    MockBackend,
    PromptTemplate,
    RecordReplayBackend,
    RenderedPrompt,
    generate,
    render_prompt,
    run_batch,
)
from .metrics import (
    ClassMetrics,
    ComparisonTable,
    ConfusionMatrix,
    EvaluationReport,
    compare_runs,
    confusion,
    evaluate,
    macro_average,
    metrics_from_confusion,
)
from .pipeline import RunArtifacts, RunConfig, StageError, run, run_grid
from .selection import (
    Bm25Params,
    CorpusStats,
    SelectedEvidence,
    SelectionError,
    Strategy,
    bm25_score,
    select,
    select_full_document,
    select_top_k_bm25,
    select_top_k_semantic,
)
from .sentences import SentenceUnit, segment_sentences, split_sentences, tokenize
from .verdicts import (
    DEFAULT_RULES,
    BatchParse,
    ParsedVerdict,
    ParseRule,
    load_rules,
    parse_batch,
    parse_verdict,
)

__version__ = "0.1.0"
