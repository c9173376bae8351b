"""Label propagation behavior, partition plumbing, and persistence."""

from __future__ import annotations

import random

import pytest

from commvec.community import (
    LpConfig,
    LpResult,
    Partition,
    label_propagation,
    partition_for_graph,
    read_partition_tsv,
    size_distribution,
    verify_converged,
    write_partition_tsv,
    write_sizes_tsv,
)
from commvec.graph import CooccurrenceGraph

from helpers import planted_block_graph, random_weighted_graph


def two_cliques() -> CooccurrenceGraph:
    """Two 4-cliques joined by a single light bridge edge."""
    edges = {}
    left = ["a1", "a2", "a3", "a4"]
    right = ["b1", "b2", "b3", "b4"]
    for group in (left, right):
        for i in range(4):
            for j in range(i + 1, 4):
                edges[(group[i], group[j])] = 10.0
    edges[("a1", "b1")] = 0.5
    return CooccurrenceGraph.build(edges)


class TestPartition:
    def test_dense_ids_required(self):
        Partition([0, 1, 0, 2])
        with pytest.raises(ValueError):
            Partition([0, 2])

    def test_from_labels_compacts_by_first_appearance(self):
        p = Partition.from_labels([7, 7, 3, 7, 9])
        assert [p.label_of(u) for u in range(5)] == [0, 0, 1, 0, 2]

    def test_members_are_sorted(self):
        p = Partition([1, 0, 1, 0])
        assert p.members == {0: (1, 3), 1: (0, 2)}
        assert p.assignment == {0: 1, 1: 0, 2: 1, 3: 0}
        assert p.num_communities == 2

    def test_equality_is_by_labels(self):
        assert Partition([0, 1]) == Partition([0, 1])
        assert Partition([0, 1]) != Partition([0, 0])

    def test_size_distribution(self):
        p = Partition([0, 0, 0, 1, 1, 2])
        assert size_distribution(p) == {3: 1, 2: 1, 1: 1}


class TestLabelPropagation:
    def test_triangle_collapses_to_one_community(self):
        g = CooccurrenceGraph.build({("a", "b"): 1, ("b", "c"): 1, ("a", "c"): 1})
        result = label_propagation(g, LpConfig(seed=0))
        assert isinstance(result, LpResult)
        assert result.converged
        assert result.partition.num_communities == 1

    def test_two_cliques_separate(self):
        g = two_cliques()
        result = label_propagation(g, LpConfig(seed=1))
        assert result.converged
        p = result.partition
        left = {p.label_of(g.id_of(t)) for t in ("a1", "a2", "a3", "a4")}
        right = {p.label_of(g.id_of(t)) for t in ("b1", "b2", "b3", "b4")}
        assert len(left) == 1
        assert len(right) == 1
        assert left != right

    def test_isolated_nodes_keep_singleton_labels(self):
        g = CooccurrenceGraph.from_weighted_edges(
            [("a", "b", 1.0)], nodes=["a", "b", "island"])
        result = label_propagation(g, LpConfig(seed=0))
        p = result.partition
        island = p.label_of(g.id_of("island"))
        assert p.members[island] == (g.id_of("island"),)

    def test_same_seed_same_partition(self):
        rng = random.Random(21)
        for _ in range(5):
            g = random_weighted_graph(rng, 30)
            seed = rng.randint(0, 10_000)
            first = label_propagation(g, LpConfig(seed=seed))
            second = label_propagation(g, LpConfig(seed=seed))
            assert first.partition == second.partition
            assert first.sweeps == second.sweeps

    def test_empty_graph_rejected(self):
        g = CooccurrenceGraph.from_weighted_edges([])
        with pytest.raises(ValueError):
            label_propagation(g, LpConfig(seed=0))

    def test_sweep_budget_respected(self):
        g, _ = planted_block_graph(0)
        result = label_propagation(g, LpConfig(seed=0, max_sweeps=1))
        assert result.sweeps == 1
        assert not result.converged or result.sweeps <= 1

    def test_converged_runs_pass_verification(self):
        rng = random.Random(33)
        for _ in range(10):
            g = random_weighted_graph(rng, 25)
            result = label_propagation(g, LpConfig(seed=rng.randint(0, 999)))
            if result.converged:
                assert verify_converged(g, result.partition)


class TestVerifyConverged:
    def test_rejects_strictly_dominated_label(self):
        g = two_cliques()
        labels = [0] * g.num_nodes
        labels[g.id_of("a1")] = 1  # a1 alone against its whole clique
        assert not verify_converged(g, Partition.from_labels(labels))

    def test_tied_votes_count_as_stable(self):
        """A 4-cycle split into adjacent halves gives every node a 1:1 vote."""
        g = CooccurrenceGraph.build({
            ("a", "b"): 1, ("b", "c"): 1, ("c", "d"): 1, ("a", "d"): 1})
        labels = {"a": 0, "b": 0, "c": 1, "d": 1}
        p = Partition.from_labels([labels[t] for t in g.terms])
        assert verify_converged(g, p)

    def test_node_count_mismatch_rejected(self):
        g = two_cliques()
        with pytest.raises(ValueError):
            verify_converged(g, Partition([0, 1]))


class TestPersistence:
    def test_partition_round_trip(self, tmp_path):
        g = two_cliques()
        p = label_propagation(g, LpConfig(seed=2)).partition
        path = tmp_path / "partition.tsv"
        write_partition_tsv(p, g.terms, path)
        mapping = read_partition_tsv(path)
        assert partition_for_graph(mapping, g) == p

    def test_write_rejects_term_count_mismatch(self, tmp_path):
        p = Partition([0, 0])
        with pytest.raises(ValueError):
            write_partition_tsv(p, ["only"], tmp_path / "p.tsv")

    def test_read_rejects_duplicates(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("a\t0\na\t1\n")
        with pytest.raises(ValueError):
            read_partition_tsv(path)

    def test_alignment_rejects_missing_and_extra_terms(self):
        g = CooccurrenceGraph.build({("a", "b"): 1})
        with pytest.raises(ValueError):
            partition_for_graph({"a": 0}, g)
        with pytest.raises(ValueError):
            partition_for_graph({"a": 0, "b": 0, "ghost": 1}, g)

    def test_sizes_file_is_sorted_histogram(self, tmp_path):
        p = Partition([0, 0, 0, 1, 1, 2])
        path = tmp_path / "sizes.tsv"
        write_sizes_tsv(p, path)
        assert path.read_text() == "1\t1\n2\t1\n3\t1\n"
