"""Sparse, interpretable word embeddings from co-occurrence graph communities.

The pipeline: count co-occurrences within a sliding window, build a
weighted graph, keep only positively associated edges (PPMI), prune
hubs and the low-degree fringe, detect communities by weighted label
propagation, and give every word one vector component per community.
"""

from .community import (
    LpConfig,
    LpResult,
    Partition,
    label_propagation,
    size_distribution,
    verify_converged,
)
from .embedding import (
    EmbeddingModel,
    SparseEmbedding,
    build_model,
    embed_new_term,
    label_communities,
    raw_component,
    sppmi,
    zscore_components,
)
from .evaluation import (
    EvalResult,
    eval_categorization,
    eval_similarity,
    purity,
    spearman,
)
from .graph import CooccurrenceGraph
from .ingest import CooccRecord, IngestConfig, ParseError
from .preprocess import (
    PreprocessConfig,
    StageReport,
    k_core,
    ppmi_filter,
    preprocess_pipeline,
    remove_top_degree,
)
from .query import NeighborResult, canonical_vector, cosine, explain, nearest

__version__ = "0.1.0"

__all__ = [
    "CooccRecord",
    "IngestConfig",
    "ParseError",
    "CooccurrenceGraph",
    "PreprocessConfig",
    "StageReport",
    "ppmi_filter",
    "k_core",
    "remove_top_degree",
    "preprocess_pipeline",
    "LpConfig",
    "LpResult",
    "Partition",
    "label_propagation",
    "verify_converged",
    "size_distribution",
    "SparseEmbedding",
    "EmbeddingModel",
    "sppmi",
    "raw_component",
    "zscore_components",
    "build_model",
    "label_communities",
    "embed_new_term",
    "NeighborResult",
    "cosine",
    "nearest",
    "canonical_vector",
    "explain",
    "EvalResult",
    "spearman",
    "purity",
    "eval_similarity",
    "eval_categorization",
    "__version__",
]
