"""Undirected weighted co-occurrence graph with PPMI edge association.

Nodes are dense integer ids assigned by sorting the vocabulary; a side
table maps ids back to terms. The graph is immutable after construction,
and every derived quantity (total weight, weighted degrees, the maximum
edge weight) is accumulated in one fixed edge order so that rebuilding
the same edge set always reproduces the same floats, bit for bit.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, Mapping

__all__ = ["CooccurrenceGraph", "SnapshotError"]

SNAPSHOT_MAGIC = "#cooccurrence-graph"


class SnapshotError(ValueError):
    """A graph snapshot file is malformed or fails an integrity check."""


class CooccurrenceGraph:
    """Immutable undirected graph over a term vocabulary.

    Node ids run 0..n-1 in lexicographic term order. Adjacency lists are
    sorted by neighbor id and edge weights are strictly positive.
    """

    __slots__ = ("_terms", "_ids", "_adj", "_wdeg", "_num_edges", "_total_weight", "_max_weight")

    def __init__(self) -> None:
        self._terms: tuple[str, ...] = ()
        self._ids: dict[str, int] = {}
        self._adj: tuple[tuple[tuple[int, float], ...], ...] = ()
        self._wdeg: tuple[float, ...] = ()
        self._num_edges = 0
        self._total_weight = 0.0
        self._max_weight = 0.0

    @classmethod
    def _assemble(
        cls, terms: list[str], triples: Iterable[tuple[int, int, float]]
    ) -> CooccurrenceGraph:
        """Build from id triples already sorted ascending by (u, v), u < v.

        The accumulation order of W, degrees, and the max weight is the
        iteration order of `triples`; callers must present edges in sorted
        order so that equal edge sets assemble to identical floats.
        """
        g = cls.__new__(cls)
        n = len(terms)
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        wdeg = [0.0] * n
        total = 0.0
        max_w = 0.0
        num_edges = 0
        for u, v, w in triples:
            adj[u].append((v, w))
            adj[v].append((u, w))
            wdeg[u] += w
            wdeg[v] += w
            total += w
            if w > max_w:
                max_w = w
            num_edges += 1
        g._terms = tuple(terms)
        g._ids = {t: i for i, t in enumerate(terms)}
        g._adj = tuple(tuple(nbrs) for nbrs in adj)
        g._wdeg = tuple(wdeg)
        g._num_edges = num_edges
        g._total_weight = total
        g._max_weight = max_w
        return g

    @classmethod
    def build(cls, edges: Mapping[tuple[str, str], float]) -> CooccurrenceGraph:
        """Build from a map of unordered term pairs to positive counts.

        Keys may appear in either orientation; (a, b) and (b, a) denote the
        same undirected edge and their counts are summed. Self-loops and
        non-positive counts are construction errors.
        """
        merged: dict[tuple[str, str], float] = {}
        for (a, b), count in edges.items():
            if a == b:
                raise ValueError(f"self-loop edge on {a!r}")
            if count <= 0:
                raise ValueError(f"edge ({a!r}, {b!r}) has non-positive count {count}")
            key = (a, b) if a < b else (b, a)
            merged[key] = merged.get(key, 0.0) + count
        return cls.from_weighted_edges((a, b, w) for (a, b), w in sorted(merged.items()))

    @classmethod
    def from_weighted_edges(
        cls, edges: Iterable[tuple[str, str, float]], nodes: Iterable[str] = ()
    ) -> CooccurrenceGraph:
        """Build from weighted term triples, plus optional isolated nodes.

        Duplicate pairs are summed. `nodes` lists terms that must exist in
        the graph even when no edge touches them.
        """
        merged: dict[tuple[str, str], float] = {}
        vocab = set(nodes)
        for a, b, w in edges:
            if a == b:
                raise ValueError(f"self-loop edge on {a!r}")
            if w <= 0:
                raise ValueError(f"edge ({a!r}, {b!r}) has non-positive weight {w}")
            key = (a, b) if a < b else (b, a)
            merged[key] = merged.get(key, 0.0) + w
            vocab.add(a)
            vocab.add(b)
        terms = sorted(vocab)
        ids = {t: i for i, t in enumerate(terms)}
        triples = [(ids[a], ids[b], w) for (a, b), w in sorted(merged.items())]
        return cls._assemble(terms, triples)

    # -- vocabulary ------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self._terms)

    @property
    def num_edges(self) -> int:
        return self._num_edges

    @property
    def total_weight(self) -> float:
        return self._total_weight

    @property
    def terms(self) -> tuple[str, ...]:
        return self._terms

    def term_of(self, u: int) -> str:
        self._check(u)
        return self._terms[u]

    def id_of(self, term: str) -> int:
        try:
            return self._ids[term]
        except KeyError:
            raise KeyError(f"unknown term {term!r}") from None

    def __contains__(self, term: str) -> bool:
        return term in self._ids

    def _check(self, u: int) -> None:
        if not 0 <= u < len(self._terms):
            raise KeyError(f"node id {u} out of range [0, {len(self._terms)})")

    # -- structure -------------------------------------------------------

    def degree(self, u: int) -> int:
        self._check(u)
        return len(self._adj[u])

    def weighted_degree(self, u: int) -> float:
        self._check(u)
        return self._wdeg[u]

    def neighbors(self, u: int) -> tuple[tuple[int, float], ...]:
        """Neighbors of u as (node id, edge weight), ascending by id."""
        self._check(u)
        return self._adj[u]

    def edge_weight(self, u: int, v: int) -> float:
        self._check(u)
        self._check(v)
        nbrs = self._adj[u]
        lo, hi = 0, len(nbrs)
        while lo < hi:
            mid = (lo + hi) // 2
            if nbrs[mid][0] < v:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(nbrs) and nbrs[lo][0] == v:
            return nbrs[lo][1]
        raise KeyError(f"no edge between nodes {u} and {v}")

    def has_edge(self, u: int, v: int) -> bool:
        try:
            self.edge_weight(u, v)
            return True
        except KeyError:
            return False

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """All edges as (u, v, weight) with u < v, in ascending (u, v) order."""
        for u, nbrs in enumerate(self._adj):
            for v, w in nbrs:
                if v > u:
                    yield u, v, w

    def max_edge_weight(self) -> float:
        if self._num_edges == 0:
            raise ValueError("graph has no edges")
        return self._max_weight

    # -- association -----------------------------------------------------

    def ppmi(self, u: int, v: int) -> float:
        """Positive pointwise mutual information of the edge (u, v).

        p(u, v) = w(u, v)/W over unordered pairs and p(u) = wd(u)/(2W);
        the value is max(0, log2(p(u, v)/(p(u) p(v)))), symmetric in u, v.
        """
        w = self.edge_weight(u, v)
        total = self._total_weight
        p_uv = w / total
        p_u = self._wdeg[u] / (2.0 * total)
        p_v = self._wdeg[v] / (2.0 * total)
        ratio = p_uv / (p_u * p_v)
        if ratio <= 1.0:
            return 0.0
        return math.log2(ratio)

    # -- derived graphs ---------------------------------------------------

    def induced_subgraph(self, keep: Iterable[int]) -> CooccurrenceGraph:
        """Subgraph on the given node ids; nodes with no surviving edges stay."""
        keep_ids = sorted(set(keep))
        for u in keep_ids:
            self._check(u)
        remap = {u: i for i, u in enumerate(keep_ids)}
        terms = [self._terms[u] for u in keep_ids]
        triples = (
            (remap[u], remap[v], w)
            for u, v, w in self.edges()
            if u in remap and v in remap
        )
        return CooccurrenceGraph._assemble(terms, triples)

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        """Write a snapshot that `load` restores bit-exactly."""
        with open(path, "w", encoding="utf-8") as out:
            out.write(
                f"{SNAPSHOT_MAGIC} nodes={self.num_nodes} edges={self.num_edges}"
                f" total_weight={self._total_weight!r}\n"
            )
            for term in self._terms:
                out.write(f"#node\t{term}\n")
            for u, v, w in self.edges():
                out.write(f"{self._terms[u]}\t{self._terms[v]}\t{w!r}\n")

    @classmethod
    def load(cls, path) -> CooccurrenceGraph:
        with open(path, encoding="utf-8") as handle:
            header = handle.readline().rstrip("\n")
            parts = header.split(" ")
            if len(parts) != 4 or parts[0] != SNAPSHOT_MAGIC:
                raise SnapshotError(f"not a graph snapshot: header {header!r}")
            try:
                n = int(parts[1].removeprefix("nodes="))
                m = int(parts[2].removeprefix("edges="))
                stated_total = float(parts[3].removeprefix("total_weight="))
            except ValueError:
                raise SnapshotError(f"unparseable snapshot header {header!r}") from None
            terms: list[str] = []
            for _ in range(n):
                line = handle.readline().rstrip("\n")
                if not line.startswith("#node\t"):
                    raise SnapshotError(f"expected #node line, got {line!r}")
                term = line[len("#node\t"):]
                if terms and term <= terms[-1]:
                    raise SnapshotError(f"vocabulary not strictly ascending at {term!r}")
                terms.append(term)
            ids = {t: i for i, t in enumerate(terms)}
            triples: list[tuple[int, int, float]] = []
            last: tuple[int, int] | None = None
            for _ in range(m):
                line = handle.readline().rstrip("\n")
                fields = line.split("\t")
                if len(fields) != 3:
                    raise SnapshotError(f"malformed edge line {line!r}")
                a, b, raw = fields
                if a not in ids or b not in ids:
                    raise SnapshotError(f"edge references unknown term in {line!r}")
                u, v = ids[a], ids[b]
                if not u < v:
                    raise SnapshotError(f"edge not in canonical orientation: {line!r}")
                if last is not None and (u, v) <= last:
                    raise SnapshotError(f"edges not strictly ascending at {line!r}")
                last = (u, v)
                w = float(raw)
                if w <= 0:
                    raise SnapshotError(f"non-positive edge weight in {line!r}")
                triples.append((u, v, w))
            if handle.readline():
                raise SnapshotError("trailing data after declared edge list")
        g = cls._assemble(terms, triples)
        if g._total_weight != stated_total:
            raise SnapshotError(
                f"total_weight mismatch: header says {stated_total!r},"
                f" edges sum to {g._total_weight!r}"
            )
        return g

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CooccurrenceGraph):
            return NotImplemented
        return self._terms == other._terms and self._adj == other._adj

    def __repr__(self) -> str:
        return (
            f"CooccurrenceGraph(nodes={self.num_nodes}, edges={self.num_edges},"
            f" total_weight={self._total_weight!r})"
        )
