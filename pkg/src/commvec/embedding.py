"""Sparse community-indexed word vectors.

Each vocabulary term gets a vector with one dimension per community.
A component starts as the mean normalized edge association between the
word and its neighbors inside that community, then is z-scored per
dimension over the words that actually have the component. Absent
components stay zero, which keeps the vectors sparse: a word can never
have more nonzero components than it has neighbors.

The per-dimension mean and standard deviation are kept on the model so
a brand-new term can be embedded later from its neighbor profile alone,
without touching any existing vector.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from math import fsum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .community import Partition
from .graph import CooccurrenceGraph

__all__ = [
    "SparseEmbedding",
    "EmbeddingModel",
    "ModelFormatError",
    "sppmi",
    "raw_component",
    "column_stats",
    "zscore_components",
    "build_model",
    "label_communities",
    "embed_new_term",
    "write_labels_tsv",
    "read_labels_tsv",
    "export_dense",
]

log = logging.getLogger(__name__)

DENSE_EXPORT_WARN_DIMS = 10_000


class ModelFormatError(ValueError):
    """A model file is malformed or fails an integrity check."""


@dataclass(frozen=True)
class SparseEmbedding:
    """Sparse vector over community dimensions.

    `indices` are strictly increasing community ids below `dim`; stored
    values are never exactly zero.
    """

    dim: int
    indices: tuple[int, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError(f"dim must be >= 0, got {self.dim}")
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must have equal length")
        prev = -1
        for idx in self.indices:
            if idx <= prev:
                raise ValueError("indices must be strictly increasing")
            if not 0 <= idx < self.dim:
                raise ValueError(f"index {idx} out of range [0, {self.dim})")
            prev = idx
        if any(v == 0.0 for v in self.values):
            raise ValueError("zero values must not be stored")

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[tuple[int, float]]) -> SparseEmbedding:
        """Build from (index, value) pairs in any order; zeros are dropped."""
        kept = sorted((i, v) for i, v in pairs if v != 0.0)
        indices = tuple(i for i, _ in kept)
        values = tuple(v for _, v in kept)
        return cls(dim, indices, values)

    @property
    def nnz(self) -> int:
        return len(self.indices)

    @property
    def entries(self) -> tuple[tuple[int, float], ...]:
        return tuple(zip(self.indices, self.values))

    def component(self, idx: int) -> float:
        """Value at a dimension, zero when absent."""
        if not 0 <= idx < self.dim:
            raise IndexError(f"index {idx} out of range [0, {self.dim})")
        lo, hi = 0, len(self.indices)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.indices[mid] < idx:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.indices) and self.indices[lo] == idx:
            return self.values[lo]
        return 0.0

    def norm(self) -> float:
        return math.sqrt(fsum(v * v for v in self.values))

    def dot(self, other: SparseEmbedding) -> float:
        """Inner product, accumulated over shared indices in ascending order."""
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        total = 0.0
        i = j = 0
        a_idx, b_idx = self.indices, other.indices
        while i < len(a_idx) and j < len(b_idx):
            if a_idx[i] == b_idx[j]:
                total += self.values[i] * other.values[j]
                i += 1
                j += 1
            elif a_idx[i] < b_idx[j]:
                i += 1
            else:
                j += 1
        return total

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))

    def to_dense(self) -> list[float]:
        dense = [0.0] * self.dim
        for i, v in zip(self.indices, self.values):
            dense[i] = v
        return dense


@dataclass
class EmbeddingModel:
    """Vocabulary of sparse vectors plus the per-dimension statistics.

    `column_mean` and `column_std` hold the normalization constants for
    every dimension that had at least one present component at build
    time; they are what `embed_new_term` applies to a new word.
    """

    dim: int
    terms: tuple[str, ...]
    vectors: tuple[SparseEmbedding, ...]
    column_mean: dict[int, float] = field(default_factory=dict)
    column_std: dict[int, float] = field(default_factory=dict)
    community_labels: dict[int, tuple[str, ...]] = field(default_factory=dict)
    provenance: str = ""

    def __post_init__(self) -> None:
        if len(self.terms) != len(self.vectors):
            raise ValueError("terms and vectors must have equal length")
        for vec in self.vectors:
            if vec.dim != self.dim:
                raise ValueError(f"vector dim {vec.dim} differs from model dim {self.dim}")
        if set(self.column_std) != set(self.column_mean):
            raise ValueError("column_mean and column_std must cover the same dimensions")
        self._index = {t: i for i, t in enumerate(self.terms)}
        if len(self._index) != len(self.terms):
            raise ValueError("duplicate terms in vocabulary")

    def __contains__(self, term: str) -> bool:
        return term in self._index

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def vector(self, term: str) -> SparseEmbedding:
        try:
            return self.vectors[self._index[term]]
        except KeyError:
            raise KeyError(f"unknown term {term!r}") from None

    # -- persistence -----------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write the sparse model file; values carry 6 significant digits."""
        with open(path, "w", encoding="utf-8") as out:
            out.write(f"#dims {self.dim} vocab {self.num_terms}\n")
            if self.provenance:
                out.write(f"#provenance {self.provenance}\n")
            for c in sorted(self.column_mean):
                out.write(f"#colstat {c} {self.column_mean[c]!r} {self.column_std[c]!r}\n")
            for term, vec in zip(self.terms, self.vectors):
                cells = " ".join(f"{i}:{v:.6g}" for i, v in zip(vec.indices, vec.values))
                out.write(f"{term} {cells}\n" if cells else f"{term}\n")

    @classmethod
    def load(cls, path: str | Path) -> EmbeddingModel:
        with open(path, encoding="utf-8") as handle:
            header = handle.readline().rstrip("\n")
            parts = header.split(" ")
            if len(parts) != 4 or parts[0] != "#dims" or parts[2] != "vocab":
                raise ModelFormatError(f"not a model file: header {header!r}")
            try:
                dim = int(parts[1])
                vocab = int(parts[3])
            except ValueError:
                raise ModelFormatError(f"unparseable model header {header!r}") from None
            provenance = ""
            col_mean: dict[int, float] = {}
            col_std: dict[int, float] = {}
            # Header lines are exactly the known #-prefixes; anything else
            # starts the vocabulary (terms may themselves begin with '#').
            line = handle.readline()
            while line.startswith(("#provenance ", "#colstat ")):
                stripped = line.rstrip("\n")
                if stripped.startswith("#provenance "):
                    provenance = stripped[len("#provenance "):]
                else:
                    fields = stripped.split(" ")
                    if len(fields) != 4:
                        raise ModelFormatError(f"malformed colstat line {stripped!r}")
                    try:
                        c = int(fields[1])
                        col_mean[c] = float(fields[2])
                        col_std[c] = float(fields[3])
                    except ValueError:
                        raise ModelFormatError(f"malformed colstat line {stripped!r}") from None
                line = handle.readline()
            terms: list[str] = []
            vectors: list[SparseEmbedding] = []
            while line:
                stripped = line.rstrip("\n")
                fields = stripped.split(" ")
                term = fields[0]
                if terms and term <= terms[-1]:
                    raise ModelFormatError(f"vocabulary not strictly ascending at {term!r}")
                pairs = []
                for cell in fields[1:]:
                    idx_raw, _, val_raw = cell.partition(":")
                    try:
                        pairs.append((int(idx_raw), float(val_raw)))
                    except ValueError:
                        raise ModelFormatError(f"malformed cell {cell!r} for {term!r}") from None
                try:
                    vec = SparseEmbedding(
                        dim, tuple(i for i, _ in pairs), tuple(v for _, v in pairs)
                    )
                except ValueError as exc:
                    raise ModelFormatError(f"invalid vector for {term!r}: {exc}") from None
                terms.append(term)
                vectors.append(vec)
                line = handle.readline()
        if len(terms) != vocab:
            raise ModelFormatError(f"header declares {vocab} terms, file has {len(terms)}")
        return cls(
            dim=dim,
            terms=tuple(terms),
            vectors=tuple(vectors),
            column_mean=col_mean,
            column_std=col_std,
            provenance=provenance,
        )


# -- association scale ----------------------------------------------------


def sppmi(g: CooccurrenceGraph, u: int, v: int) -> float:
    """Edge weight rescaled into [0, 1] by the graph's maximum edge weight."""
    return g.edge_weight(u, v) / g.max_edge_weight()


def _raw_components(
    neighbors: Iterable[tuple[int, float]], labels: Sequence[int], max_weight: float
) -> dict[int, float]:
    """Mean normalized weight per community over a neighbor profile.

    `neighbors` must be sorted ascending by node id; the accumulation
    order is what makes rebuilds and new-term embeddings bit-identical.
    """
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    for v, w in neighbors:
        c = labels[v]
        sums[c] = sums.get(c, 0.0) + w / max_weight
        counts[c] = counts.get(c, 0) + 1
    return {c: sums[c] / counts[c] for c in sums}


def raw_component(g: CooccurrenceGraph, p: Partition, n: int, c: int) -> float | None:
    """Mean sppmi from node n to its neighbors inside community c.

    Returns None when n has no neighbor in c; the component is absent
    rather than zero.
    """
    if not 0 <= c < p.num_communities:
        raise ValueError(f"community {c} out of range [0, {p.num_communities})")
    total = 0.0
    count = 0
    max_w = g.max_edge_weight() if g.num_edges else None
    for v, w in g.neighbors(n):
        if p.label_of(v) == c:
            total += w / max_w
            count += 1
    if count == 0:
        return None
    return total / count


def column_stats(values: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation of the present values."""
    mu = fsum(values) / len(values)
    var = fsum((x - mu) ** 2 for x in values) / len(values)
    return mu, math.sqrt(var)


def zscore_components(raw: Mapping[tuple[int, int], float]) -> dict[tuple[int, int], float]:
    """Z-score present (node, community) components per community.

    Statistics use only present values; a constant column (including the
    single-sample case) maps to all zeros.
    """
    by_column: dict[int, list[tuple[int, float]]] = {}
    for (n, c), value in raw.items():
        by_column.setdefault(c, []).append((n, value))
    out: dict[tuple[int, int], float] = {}
    for c, pairs in by_column.items():
        pairs.sort()
        mu, sigma = column_stats([v for _, v in pairs])
        for n, value in pairs:
            out[(n, c)] = (value - mu) / sigma if sigma > 0.0 else 0.0
    return out


# -- model construction ---------------------------------------------------


def build_model(
    g: CooccurrenceGraph,
    p: Partition,
    label_count: int = 10,
    provenance: str = "",
) -> EmbeddingModel:
    """Compose per-community means and per-dimension z-scoring over a graph.

    Components that z-score to exactly zero are dropped from storage, as
    are whole dimensions whose present values are constant.
    """
    if p.num_nodes != g.num_nodes:
        raise ValueError(f"partition covers {p.num_nodes} nodes, graph has {g.num_nodes}")
    n = g.num_nodes
    dim = p.num_communities
    labels = [p.label_of(u) for u in range(n)]
    max_w = g.max_edge_weight() if g.num_edges else 1.0
    raw_by_node = [_raw_components(g.neighbors(u), labels, max_w) for u in range(n)]

    columns: dict[int, list[float]] = {}
    for raw in raw_by_node:
        for c, value in raw.items():
            columns.setdefault(c, []).append(value)
    col_mean: dict[int, float] = {}
    col_std: dict[int, float] = {}
    for c in sorted(columns):
        col_mean[c], col_std[c] = column_stats(columns[c])

    vectors = []
    for raw in raw_by_node:
        pairs = []
        for c in sorted(raw):
            sigma = col_std[c]
            if sigma == 0.0:
                continue
            z = (raw[c] - col_mean[c]) / sigma
            if z != 0.0:
                pairs.append((c, z))
        vectors.append(
            SparseEmbedding(dim, tuple(i for i, _ in pairs), tuple(v for _, v in pairs))
        )
    return EmbeddingModel(
        dim=dim,
        terms=g.terms,
        vectors=tuple(vectors),
        column_mean=col_mean,
        column_std=col_std,
        community_labels=label_communities(g, p, label_count),
        provenance=provenance,
    )


def label_communities(
    g: CooccurrenceGraph, p: Partition, m: int
) -> dict[int, tuple[str, ...]]:
    """Top-m member terms per community by internal weighted degree.

    A member's rank weight is the summed weight of its edges to other
    members of the same community; ties break by ascending term.
    """
    if m < 1:
        raise ValueError(f"label count must be >= 1, got {m}")
    if p.num_nodes != g.num_nodes:
        raise ValueError(f"partition covers {p.num_nodes} nodes, graph has {g.num_nodes}")
    out: dict[int, tuple[str, ...]] = {}
    for c in sorted(p.members):
        nodes = p.members[c]
        strength = {}
        for u in nodes:
            total = 0.0
            for v, w in g.neighbors(u):
                if p.label_of(v) == c:
                    total += w
            strength[u] = total
        ranked = sorted(nodes, key=lambda u: (-strength[u], g.term_of(u)))
        out[c] = tuple(g.term_of(u) for u in ranked[:m])
    return out


def embed_new_term(
    g: CooccurrenceGraph,
    p: Partition,
    model: EmbeddingModel,
    neighbors: Iterable[tuple[str, float]],
) -> SparseEmbedding:
    """Embed an unseen term from its weighted neighbor profile.

    Weights live on the same scale as the graph's edge weights; repeated
    neighbor terms have their weights summed. The stored per-dimension
    statistics are applied as-is, so embedding an existing word's exact
    neighbor profile reproduces its stored vector bit for bit. Dimensions
    the model has no statistics for contribute nothing.
    """
    if model.dim != p.num_communities:
        raise ValueError(f"model dim {model.dim} differs from partition {p.num_communities}")
    agg: dict[str, float] = {}
    for term, w in neighbors:
        if w <= 0:
            raise ValueError(f"neighbor weight for {term!r} must be > 0, got {w}")
        g.id_of(term)
        agg[term] = agg.get(term, 0.0) + w
    if not agg:
        return SparseEmbedding(model.dim)
    profile = sorted((g.id_of(term), w) for term, w in agg.items())
    labels = [p.label_of(u) for u in range(p.num_nodes)]
    raw = _raw_components(profile, labels, g.max_edge_weight())
    pairs = []
    for c in sorted(raw):
        sigma = model.column_std.get(c, 0.0)
        if sigma == 0.0:
            continue
        z = (raw[c] - model.column_mean[c]) / sigma
        if z != 0.0:
            pairs.append((c, z))
    return SparseEmbedding(
        model.dim, tuple(i for i, _ in pairs), tuple(v for _, v in pairs)
    )


# -- side artifacts --------------------------------------------------------


def write_labels_tsv(labels: Mapping[int, Sequence[str]], path: str | Path) -> None:
    """Write `community_id<TAB>label1,label2,...` rows, ascending by id."""
    with open(path, "w", encoding="utf-8") as out:
        for c in sorted(labels):
            out.write(f"{c}\t{','.join(labels[c])}\n")


def read_labels_tsv(path: str | Path) -> dict[int, tuple[str, ...]]:
    out: dict[int, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected 2 fields, got {len(fields)}")
            out[int(fields[0])] = tuple(fields[1].split(","))
    return out


def export_dense(model: EmbeddingModel, path: str | Path) -> None:
    """Write a dense text export: count/dim header, then `term v1 .. vD`."""
    if model.dim > DENSE_EXPORT_WARN_DIMS:
        log.warning(
            "dense export of %d x %d values; the sparse model file is the compact form",
            model.num_terms,
            model.dim,
        )
    with open(path, "w", encoding="utf-8") as out:
        out.write(f"{model.num_terms} {model.dim}\n")
        for term, vec in zip(model.terms, model.vectors):
            row = " ".join(f"{v:.6g}" for v in vec.to_dense())
            out.write(f"{term} {row}\n" if row else f"{term}\n")
