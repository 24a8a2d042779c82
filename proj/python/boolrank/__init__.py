"""Screening prioritisation toolkit for systematic review search.

Parses PubMed-style Boolean queries, ranks candidate documents with BM25,
query likelihood (Jelinek-Mercer) or coordination-level fusion, fuses ranked
lists with CombSUM, and scores rankings with AP, Last_Rel, Recall@k% and WSS.
The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (
    AtomTerm,
    BooleanQuery,
    ClauseScorer,
    DataError,
    Document,
    Error,
    FieldKind,
    FieldTag,
    FuseError,
    FusionPolicy,
    GeneratedQuerySet,
    GeneratedQueryStore,
    GenerationConfig,
    GenerationMode,
    GenError,
    Index,
    JudgmentLevel,
    Judgments,
    MetricError,
    MetricReport,
    NodeKind,
    Normalization,
    OracleSelection,
    ParseError,
    PromptKind,
    PromptTemplate,
    RankedList,
    RunEntry,
    ScoreError,
    ScorerParams,
    Topic,
    TopicMetrics,
    append_generated_queries,
    average_precision,
    build_prompt,
    combsum,
    evaluate_runs,
    extract_terms,
    fuse_multi,
    generate,
    last_relevant_rank,
    load_candidates,
    load_corpus,
    load_or_generate,
    load_qrels,
    load_topics,
    metrics_csv,
    metrics_json,
    oracle_select,
    parse_boolean,
    rank_clf,
    read_generated_queries,
    read_run,
    recall_at_percent,
    render,
    score_bm25,
    score_qlm_jm,
    tokenize,
    top_level_clauses,
    wss,
    write_run,
)

__version__ = "0.1.0"

__all__ = [
    "AtomTerm",
    "BooleanQuery",
    "ClauseScorer",
    "DataError",
    "Document",
    "Error",
    "FieldKind",
    "FieldTag",
    "FuseError",
    "FusionPolicy",
    "GeneratedQuerySet",
    "GeneratedQueryStore",
    "GenerationConfig",
    "GenerationMode",
    "GenError",
    "Index",
    "JudgmentLevel",
    "Judgments",
    "MetricError",
    "MetricReport",
    "NodeKind",
    "Normalization",
    "OracleSelection",
    "ParseError",
    "PromptKind",
    "PromptTemplate",
    "RankedList",
    "RunEntry",
    "ScoreError",
    "ScorerParams",
    "Topic",
    "TopicMetrics",
    "append_generated_queries",
    "average_precision",
    "build_prompt",
    "combsum",
    "evaluate_runs",
    "extract_terms",
    "fuse_multi",
    "generate",
    "last_relevant_rank",
    "load_candidates",
    "load_corpus",
    "load_or_generate",
    "load_qrels",
    "load_topics",
    "metrics_csv",
    "metrics_json",
    "oracle_select",
    "parse_boolean",
    "rank_clf",
    "read_generated_queries",
    "read_run",
    "recall_at_percent",
    "render",
    "score_bm25",
    "score_qlm_jm",
    "tokenize",
    "top_level_clauses",
    "wss",
    "write_run",
]
