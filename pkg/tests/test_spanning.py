"""Spanning trees: Kirchhoff count, enumeration, Wilson sampling."""

import json

import numpy as np
import pytest

from loopsoup import spanning as sp
from loopsoup.errors import Disconnected, InvalidGraph, TooLarge
from loopsoup.fixtures import (
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
)
from loopsoup.rng import substream


def graph(doc: dict) -> sp.SimpleGraph:
    return sp.SimpleGraph.from_json_dict(doc)


class TestSimpleGraph:
    def test_json_round_trip(self, tmp_path):
        g = graph(random_connected_graph(6, 4, seed=101))
        p = tmp_path / "g.json"
        p.write_text(json.dumps(g.to_json_dict()))
        again = sp.SimpleGraph.from_json_file(p)
        assert again == g

    def test_rejects_self_loop(self):
        with pytest.raises(InvalidGraph):
            graph({"vertices": ["a", "b"], "edges": [[0, 0]]})

    def test_rejects_duplicate_edge(self):
        with pytest.raises(InvalidGraph):
            graph({"vertices": ["a", "b"], "edges": [[0, 1], [1, 0]]})

    def test_rejects_bad_index(self):
        with pytest.raises(InvalidGraph):
            graph({"vertices": ["a", "b"], "edges": [[0, 2]]})

    def test_connectivity(self):
        assert graph(path_graph(4)).is_connected()
        split = {"vertices": ["a", "b", "c", "d"], "edges": [[0, 1], [2, 3]]}
        assert not graph(split).is_connected()


class TestTreeCount:
    @pytest.mark.parametrize(
        "doc, expected",
        [
            (complete_graph(3), 3),
            (cycle_graph(4), 4),
            (complete_graph(4), 16),
            (path_graph(5), 1),
            (complete_graph(5), 125),  # n^(n-2)
        ],
    )
    def test_known_counts(self, doc, expected):
        assert sp.tree_count_det(graph(doc)) == expected

    def test_matches_enumeration_on_random_graphs(self):
        for seed in (1, 2, 3, 4, 5):
            g = graph(random_connected_graph(6, 5, seed=seed))
            trees = sp.enumerate_spanning_trees(g)
            assert sp.tree_count_det(g) == len(trees)
            assert len(set(trees)) == len(trees)

    def test_disconnected_has_no_trees(self):
        split = graph({"vertices": ["a", "b", "c", "d"], "edges": [[0, 1], [2, 3]]})
        assert sp.tree_count_det(split) == 0
        assert sp.enumerate_spanning_trees(split) == []

    def test_enumeration_cap(self):
        with pytest.raises(TooLarge):
            sp.enumerate_spanning_trees(graph(complete_graph(9)))


class TestWalkWeights:
    def test_rows_are_uniform_over_neighbors(self):
        w = sp.srw_weights(graph(complete_graph(4)))
        np.testing.assert_allclose(w.entries.real.sum(axis=1), 1.0)
        assert np.all(np.diag(w.entries.real) == 0)

    def test_isolated_vertex_rejected(self):
        g = graph({"vertices": ["a", "b", "c"], "edges": [[0, 1]]})
        with pytest.raises(Disconnected):
            sp.srw_weights(g)


class TestTreeProbability:
    @pytest.mark.parametrize(
        "doc", [complete_graph(3), cycle_graph(4), complete_graph(4)]
    )
    def test_uniform_over_trees_and_sums_to_one(self, doc):
        g = graph(doc)
        trees = sp.enumerate_spanning_trees(g)
        probs = [sp.spanning_tree_probability(g, t) for t in trees]
        np.testing.assert_allclose(probs, 1.0 / len(trees), rtol=1e-10)

    def test_root_choice_does_not_matter(self):
        g = graph(complete_graph(4))
        t = sp.enumerate_spanning_trees(g)[0]
        p0 = sp.spanning_tree_probability(g, t, root=0)
        p2 = sp.spanning_tree_probability(g, t, root=2)
        assert p0 == pytest.approx(p2, rel=1e-10)

    def test_non_tree_rejected(self):
        g = graph(complete_graph(4))
        with pytest.raises(InvalidGraph):
            # triangle plus nothing: right size, wrong shape
            sp.spanning_tree_probability(g, [(0, 1), (1, 2), (0, 2)])
        with pytest.raises(InvalidGraph):
            sp.spanning_tree_probability(g, [(0, 1), (1, 2)])


class TestWilson:
    def test_samples_are_spanning_trees(self):
        g = graph(random_connected_graph(7, 4, seed=9))
        trees = None
        rng = substream(7001)
        for _ in range(50):
            t = sp.wilson_sample(g, rng)
            assert len(t) == g.n - 1
            assert sp._spans(g.n, sorted(t))

    def test_every_tree_appears(self):
        g = graph(complete_graph(3))
        rng = substream(7002)
        seen = {sp.wilson_sample(g, rng) for _ in range(200)}
        assert seen == set(sp.enumerate_spanning_trees(g))

    def test_roughly_uniform_small_sample(self):
        # a crude screen; the acceptance suite runs the real chi-square
        g = graph(cycle_graph(4))
        rng = substream(7003)
        counts: dict = {}
        n = 4000
        for _ in range(n):
            t = sp.wilson_sample(g, rng, root=2)
            counts[t] = counts.get(t, 0) + 1
        assert len(counts) == 4
        for c in counts.values():
            assert abs(c - n / 4) < 5 * np.sqrt(n * 0.25 * 0.75)

    def test_disconnected_raises(self):
        split = graph({"vertices": ["a", "b", "c", "d"], "edges": [[0, 1], [2, 3]]})
        with pytest.raises(Disconnected):
            sp.wilson_sample(split, substream(1))

    def test_deterministic_given_stream(self):
        g = graph(complete_graph(4))
        t1 = [sp.wilson_sample(g, substream(55, k)) for k in range(10)]
        t2 = [sp.wilson_sample(g, substream(55, k)) for k in range(10)]
        assert t1 == t2
