import math
import random

import numpy as np
import pytest

from socnet import (CentralityResult, ConvergenceError, Graph, ValidationError,
                    betweenness_centrality, closeness_centrality, degree_centrality,
                    eigenvector_centrality, pagerank, top_k)
from socnet.centrality import brandes_partial

import oracles
from conftest import path_graph, star_graph


def complete_graph(k):
    g = Graph()
    labels = [f"n{i}" for i in range(k)]
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            g.add_edge(a, b)
    return g


# -- degree -------------------------------------------------------------------


def test_weighted_degree_single_edge():
    g = Graph()
    g.add_edge("A", "B", 7)
    assert degree_centrality(g, weighted=True).scores["A"] == 7
    assert degree_centrality(g).scores["A"] == 1


def test_directed_degree_counts_in_and_out():
    g = Graph(directed=True)
    g.add_edge("A", "B", 2)
    g.add_edge("C", "A", 3)
    assert degree_centrality(g).scores["A"] == 2
    assert degree_centrality(g, weighted=True).scores["A"] == 5


# -- pagerank -----------------------------------------------------------------


def pagerank_oracle(spec, damping=0.85):
    """Solve x = d (P^T x + dangling mass / n) + (1 - d)/n directly."""
    n, directed, edges = spec
    W = np.zeros((n, n))
    for (u, v), w in edges.items():
        W[u, v] = w
        if not directed:
            W[v, u] = w
    out = W.sum(axis=1)
    P = np.zeros((n, n))
    for u in range(n):
        P[u] = W[u] / out[u] if out[u] > 0 else 1.0 / n
    A = np.eye(n) - damping * P.T
    x = np.linalg.solve(A, np.full(n, (1 - damping) / n))
    return x / x.sum()


def test_pagerank_two_nodes():
    g = Graph()
    g.add_edge("A", "B", 3)
    assert pagerank(g).scores == pytest.approx({"A": 0.5, "B": 0.5})


def test_pagerank_cycle():
    g = Graph(directed=True)
    for a, b in ["AB", "BC", "CA"]:
        g.add_edge(a, b)
    assert pagerank(g).scores == pytest.approx(dict.fromkeys("ABC", 1 / 3))


def test_pagerank_matches_linear_solve():
    rng = random.Random(5)
    for _ in range(100):
        spec = oracles.random_graph_spec(rng, weighted=True)
        g = oracles.build(spec, Graph)
        got = pagerank(g, tol=1e-12, max_iter=10_000).scores
        expected = pagerank_oracle(spec)
        assert [got[f"v{i}"] for i in range(spec[0])] == pytest.approx(expected, abs=1e-9)


def test_pagerank_sum_positive_and_scale_invariant():
    rng = random.Random(9)
    for _ in range(100):
        spec = oracles.random_graph_spec(rng, weighted=True)
        g = oracles.build(spec, Graph)
        pr = pagerank(g).scores
        assert math.isclose(sum(pr.values()), 1.0, abs_tol=1e-6)
        assert min(pr.values()) > 0
        scaled = Graph(directed=g.directed)
        for lab in g.labels:
            scaled.add_node(lab)
        for e in g.edges():
            scaled.add_edge(e.source.label, e.target.label, e.weight * 37.5)
        top = top_k(pagerank(g), 1)[0][0]
        assert top_k(pagerank(scaled), 1)[0][0] == top


def test_pagerank_bad_damping():
    g = Graph()
    g.add_edge("A", "B")
    with pytest.raises(ValidationError):
        pagerank(g, damping=1.0)


def test_pagerank_nonconvergence_carries_iterate():
    g = star_graph(6)
    with pytest.raises(ConvergenceError) as exc:
        pagerank(g, tol=1e-15, max_iter=2)
    assert set(exc.value.last_iterate) == set(g.labels)
    assert exc.value.residual > 0


def test_pagerank_unweighted_flag():
    g = Graph(directed=True)
    g.add_edge("A", "B", 100)
    g.add_edge("A", "C", 1)
    w = pagerank(g).scores
    u = pagerank(g, weighted=False).scores
    assert w["B"] > w["C"]
    assert u["B"] == pytest.approx(u["C"])


# -- eigenvector --------------------------------------------------------------


def test_eigenvector_star():
    sc = eigenvector_centrality(star_graph(4)).scores
    leaves = [sc[f"leaf{i}"] for i in range(4)]
    assert sc["hub"] > max(leaves)
    assert max(leaves) - min(leaves) < 1e-9


def test_eigenvector_single_edge():
    g = Graph()
    g.add_edge("A", "B", 3)
    sc = eigenvector_centrality(g).scores
    assert sc["A"] == pytest.approx(1 / math.sqrt(2))
    assert sc["B"] == pytest.approx(1 / math.sqrt(2))


def test_eigenvector_two_equal_components():
    g = Graph()
    g.add_edge("A", "B", 2)
    g.add_edge("C", "D", 2)
    # uniform start keeps both blocks equal: each entry 1/2
    assert eigenvector_centrality(g).scores == pytest.approx(dict.fromkeys("ABCD", 0.5))


def test_eigenvector_residual():
    rng = random.Random(3)
    checked = 0
    for _ in range(60):
        spec = oracles.random_graph_spec(rng, directed=False, weighted=True)
        if not spec[2]:
            continue
        g = oracles.build(spec, Graph)
        res = eigenvector_centrality(g, tol=1e-8)
        x = np.array([res.scores[f"v{i}"] for i in range(spec[0])])
        A = np.zeros((spec[0], spec[0]))
        for (u, v), w in spec[2].items():
            A[u, v] = A[v, u] = w
        lam = res.params["eigenvalue"]
        assert np.linalg.norm(A @ x - lam * x) <= 1e-8 * np.linalg.norm(x)
        assert (x >= 0).all()
        assert lam == pytest.approx(max(np.linalg.eigvalsh(A)), rel=1e-6)
        checked += 1
    assert checked > 30


def test_eigenvector_needs_edges():
    g = Graph()
    g.add_node("A")
    with pytest.raises(ValidationError):
        eigenvector_centrality(g)


# -- closeness ----------------------------------------------------------------


def test_closeness_star_center():
    assert closeness_centrality(star_graph(4)).scores["hub"] == pytest.approx(1.0)


def test_closeness_path_end(path_abc):
    assert closeness_centrality(path_abc).scores["A"] == pytest.approx(2 / 3)


def test_closeness_isolated():
    g = path_graph(["A", "B"])
    g.add_node("Z")
    sc = closeness_centrality(g).scores
    assert sc["Z"] == 0
    # A reaches 1 of 2 others at distance 1: (1/1) * (1/2)
    assert sc["A"] == pytest.approx(0.5)


def test_closeness_subset(path_abc):
    assert set(closeness_centrality(path_abc, ["B"]).scores) == {"B"}


def test_closeness_matches_floyd_warshall():
    rng = random.Random(21)
    for _ in range(100):
        spec = oracles.random_graph_spec(rng)
        n = spec[0]
        d = oracles.floyd_warshall(spec)
        g = oracles.build(spec, Graph)
        sc = closeness_centrality(g).scores
        for v in range(n):
            reach = [d[v][u] for u in range(n) if u != v and d[v][u] < math.inf]
            exp = (len(reach) / sum(reach)) * (len(reach) / (n - 1)) if reach else 0.0
            assert sc[f"v{v}"] == pytest.approx(exp)
            assert 0 <= sc[f"v{v}"] <= 1


# -- betweenness --------------------------------------------------------------


def test_betweenness_path(path_abc):
    assert betweenness_centrality(path_abc).scores == pytest.approx({"A": 0, "B": 1.0, "C": 0})


def test_betweenness_complete():
    assert set(betweenness_centrality(complete_graph(4)).scores.values()) == {0.0}


def test_betweenness_matches_enumeration():
    rng = random.Random(7)
    for _ in range(200):
        spec = oracles.random_graph_spec(rng)
        g = oracles.build(spec, Graph)
        got = betweenness_centrality(g).scores
        exp = oracles.betweenness_oracle(spec)
        assert [got[f"v{i}"] for i in range(spec[0])] == pytest.approx(exp, abs=1e-12)
        assert all(0 <= s <= 1 + 1e-12 for s in got.values())


def test_betweenness_raw_matches_enumeration():
    rng = random.Random(8)
    for _ in range(50):
        spec = oracles.random_graph_spec(rng)
        g = oracles.build(spec, Graph)
        got = betweenness_centrality(g, normalized=False).scores
        exp = oracles.betweenness_oracle(spec, normalized=False)
        assert [got[f"v{i}"] for i in range(spec[0])] == pytest.approx(exp, abs=1e-12)


def test_brandes_partials_merge_additively():
    rng = random.Random(4)
    spec = oracles.random_graph_spec(rng, max_nodes=8, directed=True)
    g = oracles.build(spec, Graph)
    adj = g.adjacency_lists()
    full = brandes_partial(adj, range(g.n))
    halves = brandes_partial(adj, range(0, g.n, 2)) + brandes_partial(adj, range(1, g.n, 2))
    assert halves == pytest.approx(full)


def test_relabeling_equivariance():
    rng = random.Random(13)
    for _ in range(50):
        spec = oracles.random_graph_spec(rng)
        n = spec[0]
        perm = list(range(n))
        rng.shuffle(perm)
        g = oracles.build(spec, Graph)
        h = Graph(directed=spec[1])
        for i in range(n):
            h.add_node(f"w{perm[i]}")
        for (u, v), w in spec[2].items():
            h.add_edge(f"w{perm[u]}", f"w{perm[v]}", w)
        for fn in (betweenness_centrality, closeness_centrality):
            a, b = fn(g).scores, fn(h).scores
            for i in range(n):
                assert a[f"v{i}"] == pytest.approx(b[f"w{perm[i]}"])


# -- top_k ----------------------------------------------------------------------


def test_top_k_basic():
    assert top_k(CentralityResult("degree", {"A": 1, "B": 2}), 1) == [("B", 2)]


def test_top_k_tie_break():
    assert top_k(CentralityResult("degree", {"B": 1, "A": 1}), 2) == [("A", 1), ("B", 1)]


def test_top_k_oversize_and_invalid():
    res = CentralityResult("degree", {"A": 1})
    assert top_k(res, 5) == [("A", 1)]
    with pytest.raises(ValidationError):
        top_k(res, 0)


def test_scores_csv():
    res = CentralityResult("pagerank", {"A": 0.1, "B": 0.7, "C": 0.2})
    assert res.to_csv() == "node,score\nB,0.7\nC,0.2\nA,0.1\n"
    assert res.to_csv(1) == "node,score\nB,0.7\n"
