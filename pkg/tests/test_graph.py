import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socnet import Graph, NodeNotFound, ValidationError, structure_stats

import oracles
from conftest import path_graph, star_graph


def test_add_node_indices():
    g = Graph()
    assert g.add_node("A").index == 0
    assert g.add_node("A").index == 0
    assert [g.add_node(x).index for x in "BC"] == [1, 2]
    assert g.labels == ["A", "B", "C"]


def test_add_node_merges_attrs():
    g = Graph()
    g.add_node("A", {"x": 0.1})
    g.add_node("A", {"y": 0.2})
    assert g.node_attrs("A") == {"x": 0.1, "y": 0.2}
    assert g.position("A") == (0.1, 0.2)


def test_empty_label_rejected():
    with pytest.raises(ValidationError):
        Graph().add_node("")


def test_add_edge_creates_nodes():
    g = Graph()
    g.add_edge("A", "B", 1.0)
    assert (g.n, g.number_of_edges()) == (2, 1)


def test_direction_respected():
    g = Graph(directed=True)
    g.add_edge("A", "B", 3)
    assert g.has_edge("A", "B")
    assert not g.has_edge("B", "A")


def test_undirected_exposes_both_ends():
    g = Graph()
    g.add_edge("A", "B", 2)
    assert g.has_edge("B", "A")
    assert g.weight("B", "A") == 2
    assert len(list(g.edges())) == 1


def test_overwrite_semantics():
    g = Graph()
    g.add_edge("A", "B", 1, {"k": 1})
    e = g.add_edge("B", "A", 5, {"j": 2})
    assert g.weight("A", "B") == 5
    assert e.attrs == {"k": 1, "j": 2}
    assert g.number_of_edges() == 1


def test_negative_weight_rejected():
    with pytest.raises(ValidationError):
        Graph().add_edge("A", "B", -1)


def test_missing_weight_defaults_to_one():
    g = Graph()
    g.add_edge("A", "B", None)
    assert g.weight("A", "B") == 1.0


def test_degree_queries(path_abc):
    assert path_abc.degree("B", "all") == 2
    assert path_abc.degree("A") == 1
    path_abc.add_node("Z")
    assert path_abc.degree("Z") == 0
    with pytest.raises(NodeNotFound):
        path_abc.degree("nope")


def test_directed_degree_modes():
    g = Graph(directed=True)
    g.add_edge("A", "B", 2)
    g.add_edge("C", "B", 3)
    g.add_edge("B", "A", 1)
    assert g.degree("B", "in") == 2
    assert g.degree("B", "out") == 1
    assert g.degree("B", "all") == 3
    assert g.degree("B", "in", weighted=True) == 5


def test_self_loop_counts_twice_undirected():
    g = Graph()
    g.add_edge("A", "A", 1)
    g.add_edge("A", "B", 1)
    assert g.degree("A") == 3
    assert sum(g.degree(nd) for nd in g.nodes()) == 2 * g.number_of_edges()


def test_json_round_trip(tmp_path):
    g = Graph(directed=True)
    g.add_edge("Å", "B", 2.5, {"points": 12})
    g.add_node("C", {"x": 0.5, "y": 0.25})
    p = tmp_path / "g.json"
    g.save_json(p)
    h = Graph.load_json(p)
    assert h == g
    assert json.loads(p.read_text(encoding="utf-8"))["nodes"][0]["label"] == "Å"


# -- structure_stats --------------------------------------------------------


def test_stats_single_node():
    g = Graph()
    g.add_node("A")
    st_ = structure_stats(g)
    assert st_.degree_histogram == {0: 1}
    assert st_.avg_shortest_path_length == 0
    assert st_.path_length_defined is False


def test_stats_path(path_abc):
    # pairs: AB BA BC CB = 1, AC CA = 2 -> 8/6
    assert structure_stats(path_abc).avg_shortest_path_length == pytest.approx(4 / 3)


def test_stats_star_histogram():
    assert structure_stats(star_graph(5)).degree_histogram == {1: 5, 5: 1}


def test_stats_uses_largest_component():
    g = path_graph(["A", "B", "C"])
    g.add_edge("X", "Y")
    st_ = structure_stats(g)
    assert st_.component_count == 2
    assert st_.largest_component_size == 3
    assert st_.avg_shortest_path_length == pytest.approx(4 / 3)


def test_stats_matches_floyd_warshall_random():
    rng = random.Random(11)
    for _ in range(200):
        spec = oracles.random_graph_spec(rng)
        g = oracles.build(spec, Graph)
        expected, comps = oracles.avg_path_length_oracle(spec)
        got = structure_stats(g)
        assert got.avg_shortest_path_length == pytest.approx(expected)
        assert got.component_count == comps


# -- properties ---------------------------------------------------------------

edge_lists = st.lists(
    st.tuples(st.sampled_from("ABCDEFGH"), st.sampled_from("ABCDEFGH"),
              st.floats(0, 100, allow_nan=False)),
    max_size=30)


@settings(max_examples=100)
@given(edge_lists, st.booleans())
def test_handshake(edges, directed):
    g = Graph(directed=directed)
    for a, b, w in edges:
        g.add_edge(a, b, w)
    m = g.number_of_edges()
    if directed:
        assert sum(g.degree(nd, "out") for nd in g.nodes()) == m
        assert sum(g.degree(nd, "in") for nd in g.nodes()) == m
    else:
        assert sum(g.degree(nd) for nd in g.nodes()) == 2 * m


@settings(max_examples=100)
@given(edge_lists, st.booleans())
def test_label_round_trip_and_last_write_wins(edges, directed):
    g = Graph(directed=directed)
    last = {}
    for a, b, w in edges:
        g.add_edge(a, b, w)
        key = (a, b) if directed else tuple(sorted((a, b)))
        last[key] = w
    for lab in g.labels:
        assert g.label(g.index(lab)) == lab
    assert sorted(g.labels) == sorted({x for a, b, _ in edges for x in (a, b)})
    for (a, b), w in last.items():
        assert g.weight(a, b) == w
    assert list(range(g.n)) == [nd.index for nd in g.nodes()]


def test_arcs_are_sorted_and_symmetric():
    g = Graph()
    g.add_edge("B", "A", 2)
    g.add_edge("A", "C", 3)
    src, dst, w = g.arcs()
    pairs = list(zip(src.tolist(), dst.tolist(), w.tolist()))
    assert pairs == sorted(pairs)
    assert len(pairs) == 4
    assert math.isclose(w.sum(), 10)
