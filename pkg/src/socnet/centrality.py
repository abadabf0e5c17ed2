"""Degree, PageRank, eigenvector, closeness and betweenness centrality.

Closeness and betweenness use hop counts: edge weights in the bundled
datasets are co-appearance or vote strengths, which are similarities and
not distances. PageRank and eigenvector centrality use the weights.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, ValidationError
from .graph import Graph

MEASURES = ("degree", "weighted_degree", "eigenvector", "pagerank", "closeness", "betweenness")


@dataclass
class CentralityResult:
    measure: str
    scores: dict[str, float]
    params: dict = field(default_factory=dict)

    def top_k(self, k: int) -> list[tuple[str, float]]:
        return top_k(self, k)

    def to_csv(self, k: int | None = None) -> str:
        """``node,score`` rows in descending score order, full float precision."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "score"])
        rows = top_k(self, k) if k else top_k(self, max(len(self.scores), 1))
        for label, score in rows:
            w.writerow([label, repr(float(score))])
        return buf.getvalue()


def top_k(result: CentralityResult, k: int) -> list[tuple[str, float]]:
    """Highest ``k`` scores, ties broken by label in ascending order."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    ranked = sorted(result.scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]


def _require_nodes(graph: Graph):
    if graph.n == 0:
        raise ValidationError("centrality needs a non-empty graph")


def degree_centrality(graph: Graph, weighted: bool = False) -> CentralityResult:
    """Raw neighbor count or incident-weight sum (in + out for directed graphs)."""
    _require_nodes(graph)
    scores = {nd.label: graph.degree(nd, "all", weighted) for nd in graph.nodes()}
    return CentralityResult("weighted_degree" if weighted else "degree", scores,
                            {"weighted": weighted})


def pagerank(graph: Graph, damping: float = 0.85, tol: float = 1e-9, max_iter: int = 200,
             weighted: bool = True) -> CentralityResult:
    """Power iteration with uniform teleport and uniform dangling redistribution.

    Transitions follow out-edges in proportion to weight (all edges when
    undirected). Stops when the L1 change between iterates drops below ``tol``.
    """
    if not 0 < damping < 1:
        raise ValidationError(f"damping must lie in (0, 1), got {damping}")
    _require_nodes(graph)
    n = graph.n
    src, dst, w = graph.arcs()
    if not weighted:
        w = np.ones_like(w)
    out_w = np.bincount(src, weights=w, minlength=n)
    dangling = out_w == 0
    # a node whose out-edges all weigh zero is dangling too
    share = np.divide(w, out_w[src], out=np.zeros_like(w), where=out_w[src] > 0)

    x = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(max_iter):
        flow = np.bincount(dst, weights=x[src] * share, minlength=n)
        new = damping * (flow + x[dangling].sum() / n) + (1.0 - damping) / n
        new /= new.sum()
        residual = np.abs(new - x).sum()
        x = new
        if residual < tol:
            break
    else:
        raise ConvergenceError(f"pagerank did not converge in {max_iter} iterations",
                               dict(zip(graph.labels, x.tolist())), residual)
    return CentralityResult("pagerank", dict(zip(graph.labels, x.tolist())),
                            {"damping": damping, "tol": tol, "max_iter": max_iter,
                             "weighted": weighted})


def eigenvector_centrality(graph: Graph, tol: float = 1e-8, max_iter: int = 1000,
                           weighted: bool = True) -> CentralityResult:
    """Dominant eigenvector of the weighted adjacency matrix, L2-normalized.

    A node's score sums its in-neighbors' scores. The iteration runs on
    ``A + I`` from a uniform start so bipartite graphs do not oscillate, and
    stops once ``||A x - lambda x||`` falls under ``tol`` with the Rayleigh
    quotient as ``lambda``.
    """
    _require_nodes(graph)
    if graph.number_of_edges() == 0:
        raise ValidationError("eigenvector centrality needs at least one edge")
    n = graph.n
    src, dst, w = graph.arcs()
    if not weighted:
        w = np.ones_like(w)

    def apply(v):
        return np.bincount(dst, weights=v[src] * w, minlength=n)

    x = np.full(n, 1.0 / np.sqrt(n))
    residual = np.inf
    for _ in range(max_iter):
        ax = apply(x)
        x = ax + x
        x /= np.linalg.norm(x)
        ax = apply(x)
        lam = float(x @ ax)
        residual = float(np.linalg.norm(ax - lam * x))
        if residual < tol:
            break
    else:
        raise ConvergenceError(f"eigenvector iteration did not converge in {max_iter} steps",
                               dict(zip(graph.labels, x.tolist())), residual)
    x = np.abs(x)
    return CentralityResult("eigenvector", dict(zip(graph.labels, x.tolist())),
                            {"tol": tol, "max_iter": max_iter, "weighted": weighted,
                             "eigenvalue": lam})


def _bfs(adj, s):
    dist = [-1] * len(adj)
    dist[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def closeness_centrality(graph: Graph, node_subset=None) -> CentralityResult:
    """Hop-count closeness scaled by the reachable fraction of the graph.

    For ``v`` reaching ``r`` other nodes at total distance ``D`` the score is
    ``(r / D) * (r / (n - 1))``; a node reaching nothing scores 0. Distances
    follow out-edges in directed graphs.
    """
    n = graph.n
    adj = graph.adjacency_lists()
    labels = graph.labels if node_subset is None else list(node_subset)
    scores = {}
    for label in labels:
        dist = _bfs(adj, graph.index(label))
        reached = [d for d in dist if d > 0]
        r, total = len(reached), sum(reached)
        scores[label] = (r / total) * (r / (n - 1)) if total > 0 and n > 1 else 0.0
    return CentralityResult("closeness", scores, {"normalized": True, "weighted": False})


def brandes_partial(adj: list[list[int]], sources) -> np.ndarray:
    """Unnormalized dependency sums over the given sources (Brandes 2001).

    Results for disjoint source sets add up to the full-graph total, so the
    work may be split across workers and merged by summation.
    """
    n = len(adj)
    bc = np.zeros(n)
    for s in sources:
        stack = []
        preds = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc


def betweenness_centrality(graph: Graph, normalized: bool = True) -> CentralityResult:
    """Hop-count shortest-path betweenness, endpoints excluded.

    Normalization divides by the number of ordered (directed) or unordered
    (undirected) pairs of other nodes.
    """
    n = graph.n
    adj = [[v for v in nbrs if v != u] for u, nbrs in enumerate(graph.adjacency_lists())]
    bc = brandes_partial(adj, range(n))
    if not graph.directed:
        bc /= 2.0
    if normalized:
        pairs = (n - 1) * (n - 2)
        if not graph.directed:
            pairs /= 2
        bc = bc / pairs if pairs > 0 else np.zeros(n)
    return CentralityResult("betweenness", dict(zip(graph.labels, bc.tolist())),
                            {"normalized": normalized, "weighted": False})


def compute(graph: Graph, measure: str, **params) -> CentralityResult:
    """Dispatch by measure name."""
    if measure == "degree":
        return degree_centrality(graph, weighted=False)
    if measure == "weighted_degree":
        return degree_centrality(graph, weighted=True)
    if measure == "pagerank":
        return pagerank(graph, **params)
    if measure == "eigenvector":
        return eigenvector_centrality(graph, **params)
    if measure == "closeness":
        return closeness_centrality(graph, **params)
    if measure == "betweenness":
        return betweenness_centrality(graph, **params)
    raise ValidationError(f"unknown measure {measure!r}; choose from {MEASURES}")
