"""Graph pruning: PPMI edge filtering, top-degree node removal, k-core.

Each stage is a pure function from graph to graph. The pipeline default
runs the association filter first, then strips the `ntop` highest-degree
hubs, and finishes with the k-core so the final graph is guaranteed to
satisfy the minimum-degree invariant. The literal filter/kcore/ntop
order remains available through the `order` config field.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import CooccurrenceGraph

__all__ = [
    "PreprocessConfig",
    "StageReport",
    "ppmi_filter",
    "k_core",
    "remove_top_degree",
    "preprocess_pipeline",
]

DEFAULT_ORDER = ("filter", "ntop", "kcore")


@dataclass(frozen=True)
class PreprocessConfig:
    k: int = 10
    ntop: int = 200
    order: tuple[str, ...] = DEFAULT_ORDER

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")
        if self.ntop < 0:
            raise ValueError(f"ntop must be >= 0, got {self.ntop}")
        if sorted(self.order) != sorted(DEFAULT_ORDER):
            raise ValueError(
                f"order must be a permutation of {'/'.join(DEFAULT_ORDER)}, got {self.order}"
            )


@dataclass(frozen=True)
class StageReport:
    stage: str
    nodes_before: int
    nodes_after: int
    edges_before: int
    edges_after: int


def ppmi_filter(g: CooccurrenceGraph) -> CooccurrenceGraph:
    """Keep edges with strictly positive PPMI, reweighted to that value.

    Association is computed against the input graph's marginals; nodes
    stripped of all their edges are dropped.
    """
    triples = []
    for u, v, w in g.edges():
        val = g.ppmi(u, v)
        if val > 0.0:
            triples.append((g.term_of(u), g.term_of(v), val))
    return CooccurrenceGraph.from_weighted_edges(triples)


def k_core(g: CooccurrenceGraph, k: int) -> CooccurrenceGraph:
    """Maximal subgraph in which every node has at least k neighbors.

    Peels nodes whose (unweighted) degree falls below k until a fixpoint;
    the k-core is unique, so removal order does not matter. May be empty.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    n = g.num_nodes
    deg = [g.degree(u) for u in range(n)]
    removed = [False] * n
    queue = [u for u in range(n) if deg[u] < k]
    while queue:
        u = queue.pop()
        if removed[u]:
            continue
        removed[u] = True
        for v, _ in g.neighbors(u):
            if not removed[v]:
                deg[v] -= 1
                if deg[v] == k - 1:
                    queue.append(v)
    return g.induced_subgraph(u for u in range(n) if not removed[u])


def remove_top_degree(g: CooccurrenceGraph, ntop: int) -> CooccurrenceGraph:
    """Drop the ntop highest-degree nodes and their incident edges.

    Ranking is by unweighted degree descending with ties broken by
    ascending node id; nodes that merely lose their neighbors stay.
    """
    if ntop < 0:
        raise ValueError(f"ntop must be >= 0, got {ntop}")
    n = g.num_nodes
    ranked = sorted(range(n), key=lambda u: (-g.degree(u), u))
    doomed = set(ranked[: min(ntop, n)])
    return g.induced_subgraph(u for u in range(n) if u not in doomed)


def preprocess_pipeline(
    g: CooccurrenceGraph, config: PreprocessConfig
) -> tuple[CooccurrenceGraph, list[StageReport]]:
    """Run the configured pruning stages and report per-stage shrinkage."""
    stages = {
        "filter": ppmi_filter,
        "ntop": lambda graph: remove_top_degree(graph, config.ntop),
        "kcore": lambda graph: k_core(graph, config.k),
    }
    reports: list[StageReport] = []
    for name in config.order:
        before_nodes, before_edges = g.num_nodes, g.num_edges
        g = stages[name](g)
        reports.append(
            StageReport(
                stage=name,
                nodes_before=before_nodes,
                nodes_after=g.num_nodes,
                edges_before=before_edges,
                edges_after=g.num_edges,
            )
        )
    return g, reports
