"""Similarity queries over a built model.

Nearest-neighbor search is an exact full scan: every vocabulary vector
is scored by cosine and the results are ordered by descending cosine
with ties broken by ascending term, so identical inputs always produce
identical rankings. Canonical basis vectors turn single communities
into queries, and `explain` tabulates the strongest dimensions of a set
of words side by side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .embedding import EmbeddingModel, SparseEmbedding

__all__ = [
    "NeighborResult",
    "ExplainRow",
    "UnknownTermError",
    "cosine",
    "nearest",
    "canonical_vector",
    "explain",
    "levenshtein",
]


class UnknownTermError(KeyError):
    """Term not in the model vocabulary; carries closest spellings."""

    def __init__(self, term: str, suggestions: Sequence[str] = ()):
        self.term = term
        self.suggestions = tuple(suggestions)
        hint = ""
        if self.suggestions:
            hint = "; closest spellings: " + ", ".join(self.suggestions)
        super().__init__(f"unknown term {term!r}{hint}")


@dataclass(frozen=True)
class NeighborResult:
    """Ranked neighbors: (term, cosine) descending, ties by term."""

    query: str
    neighbors: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class ExplainRow:
    dim: int
    labels: tuple[str, ...]
    values: tuple[float, ...]


def cosine(a: SparseEmbedding, b: SparseEmbedding) -> float | None:
    """Cosine similarity; None when either vector has zero norm."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    norm_a = a.norm()
    norm_b = b.norm()
    if norm_a == 0.0 or norm_b == 0.0:
        return None
    return a.dot(b) / (norm_a * norm_b)


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit insert/delete/substitute costs."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, 1):
        cur = [i]
        for j, ch_b in enumerate(b, 1):
            cost = 0 if ch_a == ch_b else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def _suggestions(model: EmbeddingModel, term: str, count: int = 3) -> tuple[str, ...]:
    ranked = sorted(model.terms, key=lambda t: (levenshtein(term, t), t))
    return tuple(ranked[:count])


def nearest(
    model: EmbeddingModel, query: str | SparseEmbedding, topk: int
) -> NeighborResult:
    """Top-k vocabulary terms by cosine to a word or an arbitrary vector.

    For word queries the word itself is excluded; vocabulary vectors with
    zero norm never rank. Unknown words raise with spelling suggestions.
    """
    if topk < 1:
        raise ValueError(f"topk must be >= 1, got {topk}")
    if isinstance(query, str):
        if query not in model:
            raise UnknownTermError(query, _suggestions(model, query))
        qvec = model.vector(query)
        exclude = query
        descriptor = f"term:{query}"
    else:
        if query.dim != model.dim:
            raise ValueError(f"query dim {query.dim} differs from model dim {model.dim}")
        qvec = query
        exclude = None
        descriptor = "vector"
    if qvec.norm() == 0.0:
        raise ValueError("query vector has zero norm; cosine is undefined")
    scored = []
    for term, vec in zip(model.terms, model.vectors):
        if term == exclude:
            continue
        sim = cosine(qvec, vec)
        if sim is None:
            continue
        scored.append((term, sim))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return NeighborResult(descriptor, tuple(scored[:topk]))


def canonical_vector(model: EmbeddingModel, c: int) -> SparseEmbedding:
    """Basis vector for community c: 1 at c, 0 elsewhere."""
    if not 0 <= c < model.dim:
        raise ValueError(f"community {c} out of range [0, {model.dim})")
    return SparseEmbedding(model.dim, (c,), (1.0,))


def explain(
    model: EmbeddingModel,
    terms: Sequence[str],
    topdims: int,
    labels: dict[int, tuple[str, ...]] | None = None,
) -> list[ExplainRow]:
    """Tabulate each term's strongest dimensions, merged across terms.

    Per term, the `topdims` largest-magnitude components are selected;
    the union of selected dimensions is returned ascending, each row
    holding the community labels and every term's value there (zero when
    absent).
    """
    if topdims < 1:
        raise ValueError(f"topdims must be >= 1, got {topdims}")
    if labels is None:
        labels = model.community_labels
    vecs = []
    for term in terms:
        if term not in model:
            raise UnknownTermError(term, _suggestions(model, term))
        vecs.append(model.vector(term))
    dims: set[int] = set()
    for vec in vecs:
        strongest = sorted(vec.entries, key=lambda e: (-abs(e[1]), e[0]))[:topdims]
        dims.update(i for i, _ in strongest)
    return [
        ExplainRow(d, labels.get(d, ()), tuple(vec.component(d) for vec in vecs))
        for d in sorted(dims)
    ]
