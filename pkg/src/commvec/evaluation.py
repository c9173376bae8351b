"""Intrinsic evaluation: similarity benchmarks and categorization.

Similarity datasets are scored by the Spearman correlation between
human judgments and model cosines; categorization datasets by the
purity of a seeded spherical k-means clustering of the word vectors.
Out-of-vocabulary words (and words whose vector has zero norm) are
dropped, never substituted, and the kept fraction is reported as
coverage alongside every score.
"""

from __future__ import annotations

import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from math import fsum
from pathlib import Path
from typing import Hashable, Mapping, Sequence

import numpy as np

from .embedding import EmbeddingModel
from .ingest import ParseError
from .query import cosine

__all__ = [
    "EvalResult",
    "spearman",
    "purity",
    "load_similarity_dataset",
    "load_categorization_dataset",
    "eval_similarity",
    "eval_categorization",
]

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 100


@dataclass(frozen=True)
class EvalResult:
    metric: str
    value: float
    coverage: float
    n_kept: int

    def to_json_dict(self) -> dict:
        return {
            "metric": self.metric,
            "value": self.value,
            "coverage": self.coverage,
            "n_kept": self.n_kept,
        }


# -- metrics ----------------------------------------------------------------


def _fractional_ranks(xs: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the average of their rank span."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation: Pearson correlation of fractional ranks."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError(f"need >= 2 observations, got {len(x)}")
    rx = _fractional_ranks(x)
    ry = _fractional_ranks(y)
    n = len(rx)
    mx = fsum(rx) / n
    my = fsum(ry) / n
    cov = fsum((a - mx) * (b - my) for a, b in zip(rx, ry))
    var_x = fsum((a - mx) ** 2 for a in rx)
    var_y = fsum((b - my) ** 2 for b in ry)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("constant input: rank variance is zero")
    return cov / math.sqrt(var_x * var_y)


def purity(clusters: Mapping[Hashable, int], gold: Mapping[Hashable, str]) -> float:
    """Fraction of items whose cluster's majority gold category is theirs.

    Degenerates to 1.0 when every item sits in its own cluster, so report
    it together with the cluster count.
    """
    if set(clusters) != set(gold):
        raise ValueError("clustered and gold item sets differ")
    if not clusters:
        raise ValueError("empty item set")
    by_cluster: dict[int, Counter] = defaultdict(Counter)
    for item, cid in clusters.items():
        by_cluster[cid][gold[item]] += 1
    majority_total = sum(max(counts.values()) for counts in by_cluster.values())
    return majority_total / len(clusters)


# -- datasets ----------------------------------------------------------------


def load_similarity_dataset(path: str | Path) -> list[tuple[str, str, float]]:
    """Read `wordA<TAB>wordB<TAB>score` rows; duplicate pairs are rejected."""
    rows: list[tuple[str, str, float]] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 3:
                raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", lineno)
            a, b, raw = fields
            try:
                score = float(raw)
            except ValueError:
                raise ParseError(f"score must be a number, got {raw!r}", lineno) from None
            if not math.isfinite(score):
                raise ParseError(f"score must be finite, got {raw!r}", lineno)
            key = (a, b) if a <= b else (b, a)
            if key in seen:
                raise ParseError(f"duplicate pair {a!r}, {b!r}", lineno)
            seen.add(key)
            rows.append((a, b, score))
    return rows


def load_categorization_dataset(path: str | Path) -> list[tuple[str, str]]:
    """Read `word<TAB>category` rows; words unique, >= 2 categories."""
    rows: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise ParseError(f"expected 2 tab-separated fields, got {len(fields)}", lineno)
            word, category = fields
            if word in seen:
                raise ParseError(f"duplicate word {word!r}", lineno)
            seen.add(word)
            rows.append((word, category))
    if len(set(cat for _, cat in rows)) < 2:
        raise ParseError("dataset needs >= 2 distinct categories")
    return rows


# -- protocol -----------------------------------------------------------------


def eval_similarity(model: EmbeddingModel, ds: Sequence[tuple[str, str, float]]) -> EvalResult:
    """Spearman between human scores and model cosines over kept pairs."""
    human: list[float] = []
    sims: list[float] = []
    for a, b, score in ds:
        if a not in model or b not in model:
            continue
        sim = cosine(model.vector(a), model.vector(b))
        if sim is None:
            continue
        human.append(score)
        sims.append(sim)
    if len(human) < 2:
        raise ValueError(f"only {len(human)} of {len(ds)} pairs kept; need >= 2")
    value = spearman(human, sims)
    return EvalResult("spearman", value, len(human) / len(ds), len(human))


def eval_categorization(
    model: EmbeddingModel, ds: Sequence[tuple[str, str]], seed: int
) -> EvalResult:
    """Purity of seeded spherical k-means against gold categories.

    k is the number of gold categories among kept words; vectors are
    length-normalized; the best of 10 restarts by within-cluster cosine
    objective is scored.
    """
    kept: list[tuple[str, str]] = []
    for word, category in ds:
        if word not in model:
            continue
        if model.vector(word).nnz == 0:
            continue
        kept.append((word, category))
    if len(kept) < 2:
        raise ValueError(f"only {len(kept)} of {len(ds)} words kept; need >= 2")
    k = len(set(category for _, category in kept))
    if k < 2:
        raise ValueError("kept words span a single category; need >= 2")

    matrix = np.zeros((len(kept), model.dim))
    for i, (word, _) in enumerate(kept):
        vec = model.vector(word)
        for idx, value in zip(vec.indices, vec.values):
            matrix[i, idx] = value
    matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)

    assign = _spherical_kmeans(matrix, k, seed)
    clusters = {word: int(assign[i]) for i, (word, _) in enumerate(kept)}
    gold = {word: category for word, category in kept}
    value = purity(clusters, gold)
    return EvalResult("purity", value, len(kept) / len(ds), len(kept))


def _seed_centers(matrix: np.ndarray, k: int, rng: random.Random) -> np.ndarray:
    """Pick k initial centroids by distance-weighted seeding.

    The first centroid is a uniform draw; each later one is drawn with
    probability proportional to one minus the point's best cosine to the
    centroids chosen so far, so spread-out inits are strongly preferred.
    Falls back to uniform draws when every point is already covered.
    """
    n = matrix.shape[0]
    chosen = [rng.randrange(n)]
    best_sim = matrix @ matrix[chosen[0]]
    while len(chosen) < k:
        weights = np.clip(1.0 - best_sim, 0.0, None)
        total = float(weights.sum())
        if total <= 0.0:
            idx = rng.randrange(n)
        else:
            target = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(weights), target, side="right"))
            idx = min(idx, n - 1)
        chosen.append(idx)
        best_sim = np.maximum(best_sim, matrix @ matrix[idx])
    return matrix[chosen].copy()


def _spherical_kmeans(matrix: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Cosine k-means on unit rows; deterministic given the seed.

    Restart initializations draw from one seeded RNG; the winner is the
    restart with the highest summed point-to-centroid cosine, earliest
    restart on ties. Empty clusters keep their previous centroid.
    """
    n = matrix.shape[0]
    rng = random.Random(seed)
    best_obj = -math.inf
    best_assign: np.ndarray | None = None
    for _ in range(KMEANS_RESTARTS):
        centers = _seed_centers(matrix, k, rng)
        assign: np.ndarray | None = None
        obj = -math.inf
        for _ in range(KMEANS_MAX_ITER):
            sims = matrix @ centers.T
            new_assign = np.argmax(sims, axis=1)
            obj = float(sims[np.arange(n), new_assign].sum())
            if assign is not None and np.array_equal(new_assign, assign):
                break
            assign = new_assign
            for c in range(k):
                members = matrix[assign == c]
                if len(members) == 0:
                    continue
                center = members.mean(axis=0)
                norm = np.linalg.norm(center)
                if norm > 0.0:
                    centers[c] = center / norm
        if obj > best_obj:
            best_obj = obj
            best_assign = assign.copy()
    assert best_assign is not None
    return best_assign
