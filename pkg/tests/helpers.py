"""Shared generators and brute-force oracles for the test suite.

Everything here is deliberately naive: straight-line recomputations and
repeated-removal loops that are easy to audit by eye, used to check the
real implementations against an independent reference.
"""

from __future__ import annotations

import math
import random
from collections import Counter

from commvec.graph import CooccurrenceGraph


def random_weighted_graph(rng: random.Random, max_nodes: int,
                          density: float = 0.25,
                          max_weight: int = 20) -> CooccurrenceGraph:
    """A random undirected graph with integer-valued positive weights."""
    n = rng.randint(2, max_nodes)
    terms = [f"w{i:03d}" for i in range(n)]
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges[(terms[i], terms[j])] = float(rng.randint(1, max_weight))
    if not edges:
        edges[(terms[0], terms[1])] = float(rng.randint(1, max_weight))
    return CooccurrenceGraph.from_weighted_edges(
        [(a, b, w) for (a, b), w in edges.items()], nodes=terms)


def planted_block_graph(graph_seed: int) -> tuple[CooccurrenceGraph, list[int]]:
    """Four blocks of 25 nodes, edge probability 0.3 inside and 0.01 across.

    Returns the graph and the ground-truth block id per node id. Node ids
    coincide with term order because terms are generated pre-sorted.
    """
    rng = random.Random(graph_seed)
    terms = [f"n{i:03d}" for i in range(100)]
    triples = []
    for i in range(100):
        for j in range(i + 1, 100):
            p = 0.3 if i // 25 == j // 25 else 0.01
            if rng.random() < p:
                triples.append((terms[i], terms[j], 1.0))
    g = CooccurrenceGraph.from_weighted_edges(triples, nodes=terms)
    return g, [i // 25 for i in range(100)]


def topic_corpus(seed: int, n_topics: int = 5, n_words: int = 50,
                 n_cores: int = 3, n_partners: int = 5,
                 context_docs: int = 160, context_len: int = 8,
                 core_reps: int = 25) -> list[str]:
    """Synthetic documents over disjoint per-topic vocabularies.

    Each topic owns `n_words` words. Most documents are broad samples from
    the topic's regular words; a few focus words co-occur only with a small
    set of dedicated partners, in short repeated documents. Lines are
    shuffled so no stage can rely on document order.
    """
    rng = random.Random(seed)
    lines = []
    for t in range(n_topics):
        words = [f"t{t}w{i:02d}" for i in range(n_words)]
        regulars, cores = words[:n_words - n_cores], words[n_words - n_cores:]
        for _ in range(context_docs):
            lines.append(" ".join(rng.sample(regulars, context_len)))
        for j, core in enumerate(cores):
            for partner in regulars[n_partners * j: n_partners * (j + 1)]:
                lines.extend([f"{core} {partner}"] * core_reps)
    rng.shuffle(lines)
    return lines


def topic_of(word: str) -> str:
    return "topic" + word[1]


def ppmi_oracle(g: CooccurrenceGraph, u: int, v: int) -> float:
    """Straight-line recomputation of the edge association weight."""
    w = g.edge_weight(u, v)
    total = g.total_weight
    p_uv = w / total
    p_u = g.weighted_degree(u) / (2.0 * total)
    p_v = g.weighted_degree(v) / (2.0 * total)
    ratio = p_uv / (p_u * p_v)
    if ratio <= 1.0:
        return 0.0
    return math.log2(ratio)


def k_core_oracle(g: CooccurrenceGraph, k: int) -> tuple[set[str], set[tuple[str, str]]]:
    """Repeated removal of any node with degree below k, to a fixpoint.

    Returns surviving node terms and surviving edges as term pairs.
    """
    adj = {u: {v for v, _ in g.neighbors(u)} for u in range(g.num_nodes)}
    alive = set(adj)
    changed = True
    while changed:
        changed = False
        for u in sorted(alive):
            if len(adj[u] & alive) < k:
                alive.discard(u)
                changed = True
    nodes = {g.term_of(u) for u in alive}
    edges = set()
    for u in alive:
        for v in adj[u] & alive:
            a, b = sorted((g.term_of(u), g.term_of(v)))
            edges.add((a, b))
    return nodes, edges


def window_pairs_oracle(tokens: list[str], window: int) -> Counter:
    """All unordered token pairs within the sliding window, hand-rolled."""
    counts: Counter = Counter()
    for i, left in enumerate(tokens):
        for j in range(i + 1, min(i + window, len(tokens))):
            right = tokens[j]
            if left == right:
                continue
            counts[(min(left, right), max(left, right))] += 1
    return counts
