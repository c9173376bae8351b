"""Weighted asynchronous label propagation and the resulting partition.

Every node starts in its own community. Sweeps visit the nodes in a
freshly shuffled order; each node adopts the label with the largest
total incident edge weight among its neighbors, keeping its current
label whenever that label is among the maximizers. A sweep with zero
label changes is a fixpoint and stops the run; a safety bound caps the
sweep count for graphs that would otherwise oscillate.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .graph import CooccurrenceGraph

__all__ = [
    "LpConfig",
    "Partition",
    "LpResult",
    "label_propagation",
    "verify_converged",
    "size_distribution",
    "write_partition_tsv",
    "read_partition_tsv",
    "partition_for_graph",
    "write_sizes_tsv",
]


@dataclass(frozen=True)
class LpConfig:
    seed: int = 0
    max_sweeps: int = 100

    def __post_init__(self) -> None:
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")


class Partition:
    """Assignment of node ids 0..n-1 to dense community ids 0..k-1."""

    __slots__ = ("_labels", "_members")

    def __init__(self, labels: Sequence[int]):
        labels = list(labels)
        dense = sorted(set(labels))
        if labels and dense != list(range(len(dense))):
            raise ValueError("community ids must be dense integers starting at 0")
        members: dict[int, list[int]] = {c: [] for c in dense}
        for u, c in enumerate(labels):
            members[c].append(u)
        self._labels = labels
        self._members = {c: tuple(nodes) for c, nodes in members.items()}

    @classmethod
    def from_labels(cls, raw: Sequence[int]) -> Partition:
        """Compact arbitrary labels to dense ids by first appearance in node order."""
        remap: dict[int, int] = {}
        labels = []
        for lab in raw:
            if lab not in remap:
                remap[lab] = len(remap)
            labels.append(remap[lab])
        return cls(labels)

    @property
    def num_nodes(self) -> int:
        return len(self._labels)

    @property
    def num_communities(self) -> int:
        return len(self._members)

    def label_of(self, u: int) -> int:
        return self._labels[u]

    @property
    def assignment(self) -> dict[int, int]:
        return {u: c for u, c in enumerate(self._labels)}

    @property
    def members(self) -> dict[int, tuple[int, ...]]:
        """Community id to its member node ids, ascending."""
        return self._members

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._labels == other._labels

    def __repr__(self) -> str:
        return f"Partition(nodes={self.num_nodes}, communities={self.num_communities})"


@dataclass(frozen=True)
class LpResult:
    partition: Partition
    converged: bool
    sweeps: int


def _votes(g: CooccurrenceGraph, labels: Sequence[int], u: int) -> dict[int, float]:
    # Accumulated in adjacency order (ascending neighbor id) for determinism.
    votes: dict[int, float] = {}
    for v, w in g.neighbors(u):
        lab = labels[v]
        votes[lab] = votes.get(lab, 0.0) + w
    return votes


def label_propagation(g: CooccurrenceGraph, config: LpConfig) -> LpResult:
    """Run weighted label propagation until a zero-change sweep.

    Ties keep the node's current label when it is among the maximizers,
    otherwise one maximizer is drawn uniformly from the seeded RNG. The
    result carries a converged flag; when max_sweeps runs out first, the
    partition of the last sweep is returned with the flag unset.
    """
    n = g.num_nodes
    if n == 0:
        raise ValueError("label propagation needs a non-empty graph")
    rng = random.Random(config.seed)
    labels = list(range(n))
    order = list(range(n))
    converged = False
    sweeps = 0
    for _ in range(config.max_sweeps):
        sweeps += 1
        rng.shuffle(order)
        changed = 0
        for u in order:
            votes = _votes(g, labels, u)
            if not votes:
                continue
            best = max(votes.values())
            winners = [lab for lab, total in votes.items() if total == best]
            if labels[u] in winners:
                continue
            if len(winners) > 1:
                winners.sort()
                new_label = rng.choice(winners)
            else:
                new_label = winners[0]
            labels[u] = new_label
            changed += 1
        if changed == 0:
            converged = True
            break
    return LpResult(Partition.from_labels(labels), converged, sweeps)


def verify_converged(g: CooccurrenceGraph, p: Partition) -> bool:
    """Check the stopping criterion on an arbitrary partition.

    A node invalidates the fixpoint only when a single label strictly
    dominates its neighborhood vote and differs from the node's current
    label; vote ties leave the updater free to keep any label, so they
    count as stable. Isolated nodes are always stable.
    """
    if p.num_nodes != g.num_nodes:
        raise ValueError(
            f"partition covers {p.num_nodes} nodes, graph has {g.num_nodes}"
        )
    labels = [p.label_of(u) for u in range(p.num_nodes)]
    for u in range(g.num_nodes):
        votes = _votes(g, labels, u)
        if not votes:
            continue
        best = max(votes.values())
        winners = [lab for lab, total in votes.items() if total == best]
        if len(winners) == 1 and winners[0] != p.label_of(u):
            return False
    return True


def size_distribution(p: Partition) -> dict[int, int]:
    """Histogram mapping community size to the number of communities."""
    return dict(Counter(len(nodes) for nodes in p.members.values()))


def write_partition_tsv(p: Partition, terms: Sequence[str], path: str | Path) -> None:
    """Write `term<TAB>community_id` rows in node-id order."""
    if len(terms) != p.num_nodes:
        raise ValueError(f"{len(terms)} terms for {p.num_nodes} nodes")
    with open(path, "w", encoding="utf-8") as out:
        for u, term in enumerate(terms):
            out.write(f"{term}\t{p.label_of(u)}\n")


def read_partition_tsv(path: str | Path) -> dict[str, int]:
    """Read a partition file back as a term to community-id map."""
    mapping: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected 2 fields, got {len(fields)}")
            term, raw = fields
            if term in mapping:
                raise ValueError(f"line {lineno}: duplicate term {term!r}")
            mapping[term] = int(raw)
    return mapping


def partition_for_graph(mapping: Mapping[str, int], g: CooccurrenceGraph) -> Partition:
    """Align a term to community map with a graph's node ids."""
    missing = [t for t in g.terms if t not in mapping]
    if missing:
        raise ValueError(f"partition is missing {len(missing)} graph terms, e.g. {missing[0]!r}")
    extra = [t for t in mapping if t not in g]
    if extra:
        raise ValueError(f"partition has {len(extra)} terms not in the graph, e.g. {extra[0]!r}")
    return Partition.from_labels([mapping[t] for t in g.terms])


def write_sizes_tsv(p: Partition, path: str | Path) -> None:
    """Write the size histogram as `size<TAB>count`, ascending by size."""
    with open(path, "w", encoding="utf-8") as out:
        for size, count in sorted(size_distribution(p).items()):
            out.write(f"{size}\t{count}\n")
