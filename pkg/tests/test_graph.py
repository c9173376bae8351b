"""Graph construction, association weighting, and snapshot persistence."""

from __future__ import annotations

import math
import random

import pytest

from commvec.graph import CooccurrenceGraph, SnapshotError

from helpers import ppmi_oracle, random_weighted_graph


def triangle() -> CooccurrenceGraph:
    return CooccurrenceGraph.build({("a", "b"): 2, ("a", "c"): 2, ("b", "c"): 4})


class TestBuild:
    def test_terms_are_sorted_and_indexed(self):
        g = CooccurrenceGraph.build({("zebra", "ant"): 1, ("mole", "ant"): 2})
        assert g.terms == ("ant", "mole", "zebra")
        for i, term in enumerate(g.terms):
            assert g.id_of(term) == i
            assert g.term_of(i) == term
        assert "ant" in g
        assert "yak" not in g

    def test_duplicate_orientations_are_summed(self):
        g = CooccurrenceGraph.build({("a", "b"): 2, ("b", "a"): 3})
        assert g.num_edges == 1
        assert g.edge_weight(g.id_of("a"), g.id_of("b")) == 5.0

    def test_self_loops_rejected(self):
        with pytest.raises(ValueError):
            CooccurrenceGraph.build({("a", "a"): 1})

    def test_nonpositive_weights_rejected(self):
        with pytest.raises(ValueError):
            CooccurrenceGraph.build({("a", "b"): 0})
        with pytest.raises(ValueError):
            CooccurrenceGraph.build({("a", "b"): -3})

    def test_from_weighted_edges_keeps_isolated_nodes(self):
        g = CooccurrenceGraph.from_weighted_edges(
            [("a", "b", 1.0)], nodes=["a", "b", "lonely"])
        assert g.num_nodes == 3
        assert g.degree(g.id_of("lonely")) == 0
        assert g.weighted_degree(g.id_of("lonely")) == 0.0

    def test_unknown_id_raises(self):
        g = triangle()
        with pytest.raises(KeyError):
            g.term_of(99)
        with pytest.raises(KeyError):
            g.id_of("nope")


class TestAccessors:
    def test_degrees_and_totals(self):
        g = triangle()
        a, b, c = (g.id_of(t) for t in "abc")
        assert g.num_nodes == 3
        assert g.num_edges == 3
        assert g.total_weight == 8.0
        assert g.degree(a) == 2
        assert g.weighted_degree(a) == 4.0
        assert g.weighted_degree(c) == 6.0

    def test_neighbors_sorted_by_id(self):
        g = CooccurrenceGraph.build(
            {("m", "z"): 1, ("m", "a"): 2, ("m", "q"): 3})
        m = g.id_of("m")
        ids = [v for v, _ in g.neighbors(m)]
        assert ids == sorted(ids)
        assert [g.term_of(v) for v in ids] == ["a", "q", "z"]

    def test_edge_weight_and_has_edge(self):
        g = triangle()
        a, b, c = (g.id_of(t) for t in "abc")
        assert g.edge_weight(b, c) == 4.0
        assert g.edge_weight(c, b) == 4.0
        assert g.has_edge(a, b)
        g2 = CooccurrenceGraph.build({("a", "b"): 1, ("c", "d"): 1})
        assert not g2.has_edge(g2.id_of("a"), g2.id_of("c"))
        with pytest.raises(KeyError):
            g2.edge_weight(g2.id_of("a"), g2.id_of("c"))

    def test_edges_iterates_ascending_canonical(self):
        rng = random.Random(5)
        g = random_weighted_graph(rng, 20)
        listed = list(g.edges())
        assert listed == sorted(listed)
        assert all(u < v for u, v, _ in listed)
        assert len(listed) == g.num_edges

    def test_max_edge_weight(self):
        assert triangle().max_edge_weight() == 4.0
        empty = CooccurrenceGraph.from_weighted_edges([], nodes=["a", "b"])
        with pytest.raises(ValueError):
            empty.max_edge_weight()


class TestAssociationWeight:
    def test_triangle_hand_values(self):
        g = triangle()
        a, b, c = (g.id_of(t) for t in "abc")
        assert g.ppmi(a, b) == pytest.approx(1.4150374992788437, abs=1e-12)
        assert g.ppmi(b, c) == pytest.approx(1.8300749985576876, abs=1e-12)
        assert g.ppmi(a, b) == g.ppmi(a, c)

    def test_star_center_leaf(self):
        """K(1,3) with unit weights: every spoke scores exactly 2 bits."""
        g = CooccurrenceGraph.build(
            {("hub", "x"): 1, ("hub", "y"): 1, ("hub", "z"): 1})
        hub = g.id_of("hub")
        for leaf in ("x", "y", "z"):
            assert g.ppmi(hub, g.id_of(leaf)) == pytest.approx(2.0, abs=1e-12)

    def test_independence_yields_exact_zero(self):
        """A pair co-occurring exactly at chance level maps to 0.0, not an epsilon."""
        g = CooccurrenceGraph.build(
            {("u", "v"): 1, ("u", "x"): 15, ("v", "y"): 15, ("s", "t"): 33})
        assert g.ppmi(g.id_of("u"), g.id_of("v")) == 0.0

    def test_matches_oracle_on_random_graphs(self):
        rng = random.Random(31)
        for _ in range(25):
            g = random_weighted_graph(rng, 25)
            for u, v, _ in g.edges():
                assert g.ppmi(u, v) == pytest.approx(ppmi_oracle(g, u, v), abs=1e-12)

    def test_scale_invariance(self):
        rng = random.Random(32)
        g = random_weighted_graph(rng, 15)
        scaled = CooccurrenceGraph.from_weighted_edges(
            [(g.term_of(u), g.term_of(v), w * 7.0) for u, v, w in g.edges()],
            nodes=g.terms)
        for u, v, _ in g.edges():
            assert scaled.ppmi(u, v) == pytest.approx(g.ppmi(u, v), abs=1e-9)

    def test_nonedge_raises(self):
        g = CooccurrenceGraph.build({("a", "b"): 1, ("c", "d"): 1})
        with pytest.raises(KeyError):
            g.ppmi(g.id_of("a"), g.id_of("c"))


class TestInducedSubgraph:
    def test_keeps_requested_isolates(self):
        g = triangle()
        keep = [g.id_of("a"), g.id_of("b")]
        sub = g.induced_subgraph(keep)
        assert sub.terms == ("a", "b")
        assert sub.num_edges == 1
        assert sub.total_weight == 2.0

    def test_node_with_no_surviving_edges_stays(self):
        g = CooccurrenceGraph.build({("a", "b"): 1, ("c", "d"): 5})
        sub = g.induced_subgraph([g.id_of("a"), g.id_of("b"), g.id_of("c")])
        assert sub.terms == ("a", "b", "c")
        assert sub.degree(sub.id_of("c")) == 0

    def test_weights_unchanged(self):
        rng = random.Random(8)
        g = random_weighted_graph(rng, 20)
        keep = list(range(0, g.num_nodes, 2))
        sub = g.induced_subgraph(keep)
        for u, v, w in sub.edges():
            assert g.edge_weight(g.id_of(sub.term_of(u)), g.id_of(sub.term_of(v))) == w


class TestSnapshot:
    def test_round_trip_equality(self, tmp_path):
        rng = random.Random(13)
        for i in range(5):
            g = random_weighted_graph(rng, 30)
            path = tmp_path / f"g{i}.snapshot"
            g.save(path)
            assert CooccurrenceGraph.load(path) == g

    def test_round_trip_with_isolates_and_float_weights(self, tmp_path):
        g = CooccurrenceGraph.from_weighted_edges(
            [("a", "b", 0.1 + 0.2), ("b", "c", math.pi)], nodes=["a", "b", "c", "zzz"])
        path = tmp_path / "g.snapshot"
        g.save(path)
        loaded = CooccurrenceGraph.load(path)
        assert loaded == g
        assert loaded.edge_weight(0, 1) == 0.30000000000000004

    def test_header_magic_required(self, tmp_path):
        path = tmp_path / "bad"
        path.write_text("#something nodes=0 edges=0 total_weight=0.0\n")
        with pytest.raises(SnapshotError):
            CooccurrenceGraph.load(path)

    def test_unsorted_vocabulary_rejected(self, tmp_path):
        path = tmp_path / "bad"
        path.write_text(
            "#cooccurrence-graph nodes=2 edges=0 total_weight=0.0\n"
            "#node\tb\n#node\ta\n")
        with pytest.raises(SnapshotError):
            CooccurrenceGraph.load(path)

    def test_trailing_data_rejected(self, tmp_path):
        g = triangle()
        path = tmp_path / "g.snapshot"
        g.save(path)
        with open(path, "a", encoding="utf-8") as out:
            out.write("extra\tgarbage\t1.0\n")
        with pytest.raises(SnapshotError):
            CooccurrenceGraph.load(path)

    def test_total_weight_mismatch_rejected(self, tmp_path):
        g = triangle()
        path = tmp_path / "g.snapshot"
        g.save(path)
        body = path.read_text().replace("total_weight=8.0", "total_weight=9.0")
        path.write_text(body)
        with pytest.raises(SnapshotError):
            CooccurrenceGraph.load(path)

    def test_noncanonical_edge_rejected(self, tmp_path):
        path = tmp_path / "bad"
        path.write_text(
            "#cooccurrence-graph nodes=2 edges=1 total_weight=1.0\n"
            "#node\ta\n#node\tb\n"
            "b\ta\t1.0\n")
        with pytest.raises(SnapshotError):
            CooccurrenceGraph.load(path)
