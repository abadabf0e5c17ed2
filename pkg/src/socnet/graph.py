"""Weighted graph with string node labels and dense integer indices.

Node identity is the label; the index is an internal, insertion-ordered
position used by the numeric algorithms. Edges are stored once per ordered
pair (directed) or unordered pair (undirected) and re-adding a pair
overwrites its weight.
"""

from __future__ import annotations

import json
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from .errors import FormatError, NodeNotFound, ValidationError

MODES = ("in", "out", "all")


@dataclass(frozen=True)
class NodeRef:
    index: int
    label: str


@dataclass(frozen=True)
class Edge:
    source: NodeRef
    target: NodeRef
    weight: float
    attrs: dict = field(default_factory=dict, compare=False)


class Graph:
    def __init__(self, directed: bool = False):
        self.directed = directed
        self._labels: list[str] = []
        self._index: dict[str, int] = {}
        self._node_attrs: list[dict] = []
        self._succ: list[dict[int, float]] = []
        self._pred: list[dict[int, float]] = []
        self._edge_attrs: dict[tuple[int, int], dict] = {}

    # -- construction -----------------------------------------------------

    def add_node(self, label: str, attrs: dict | None = None) -> NodeRef:
        if not isinstance(label, str) or not label:
            raise ValidationError(f"node label must be a non-empty string, got {label!r}")
        idx = self._index.get(label)
        if idx is None:
            idx = len(self._labels)
            self._labels.append(label)
            self._index[label] = idx
            self._node_attrs.append({})
            self._succ.append({})
            self._pred.append({})
        if attrs:
            self._node_attrs[idx].update(attrs)
        return NodeRef(idx, label)

    def add_edge(self, source: str, target: str, weight: float = 1.0,
                 attrs: dict | None = None) -> Edge:
        if weight is None:
            weight = 1.0
        weight = float(weight)
        if not weight >= 0 or math.isinf(weight):
            raise ValidationError(f"edge weight must be finite and >= 0, got {weight}")
        s = self.add_node(source)
        t = self.add_node(target)
        key = self._key(s.index, t.index)
        self._succ[s.index][t.index] = weight
        if self.directed:
            self._pred[t.index][s.index] = weight
        else:
            self._succ[t.index][s.index] = weight
        merged = self._edge_attrs.setdefault(key, {})
        if attrs:
            merged.update(attrs)
        return Edge(s, t, weight, dict(merged))

    def _key(self, u: int, v: int) -> tuple[int, int]:
        if self.directed or u <= v:
            return (u, v)
        return (v, u)

    # -- lookup -----------------------------------------------------------

    def node(self, label: str) -> NodeRef:
        try:
            return NodeRef(self._index[label], label)
        except KeyError:
            raise NodeNotFound(label) from None

    def index(self, label: str) -> int:
        return self.node(label).index

    def label(self, index: int) -> str:
        return self._labels[index]

    @property
    def labels(self) -> list[str]:
        return list(self._labels)

    def __contains__(self, label) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self._labels)

    @property
    def n(self) -> int:
        return len(self._labels)

    def number_of_edges(self) -> int:
        return len(self._edge_attrs)

    def nodes(self) -> list[NodeRef]:
        return [NodeRef(i, lab) for i, lab in enumerate(self._labels)]

    def node_attrs(self, label: str) -> dict:
        return self._node_attrs[self.index(label)]

    def position(self, label: str) -> tuple[float, float] | None:
        a = self.node_attrs(label)
        if "x" in a and "y" in a:
            return (float(a["x"]), float(a["y"]))
        return None

    def has_edge(self, source: str, target: str) -> bool:
        if source not in self._index or target not in self._index:
            return False
        return self._index[target] in self._succ[self._index[source]]

    def weight(self, source: str, target: str) -> float:
        u, v = self.index(source), self.index(target)
        try:
            return self._succ[u][v]
        except KeyError:
            raise KeyError(f"no edge {source!r} -> {target!r}") from None

    def edge_attrs(self, source: str, target: str) -> dict:
        u, v = self.index(source), self.index(target)
        if v not in self._succ[u]:
            raise KeyError(f"no edge {source!r} -> {target!r}")
        return self._edge_attrs[self._key(u, v)]

    def edges(self) -> Iterator[Edge]:
        """Each edge once, ordered by (source index, target index)."""
        for u, nbrs in enumerate(self._succ):
            for v in sorted(nbrs):
                if not self.directed and v < u:
                    continue
                yield Edge(NodeRef(u, self._labels[u]), NodeRef(v, self._labels[v]),
                           nbrs[v], self._edge_attrs[self._key(u, v)])

    def successors(self, label: str) -> list[str]:
        return [self._labels[v] for v in sorted(self._succ[self.index(label)])]

    def predecessors(self, label: str) -> list[str]:
        src = self._pred if self.directed else self._succ
        return [self._labels[v] for v in sorted(src[self.index(label)])]

    neighbors = successors

    def out_weights(self, u: int) -> dict[int, float]:
        return self._succ[u]

    def in_weights(self, u: int) -> dict[int, float]:
        return self._pred[u] if self.directed else self._succ[u]

    def max_weight(self) -> float:
        return max((w for nbrs in self._succ for w in nbrs.values()), default=0.0)

    # -- structure --------------------------------------------------------

    def degree(self, node: str | NodeRef, mode: str = "all", weighted: bool = False) -> float:
        if mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
        u = node.index if isinstance(node, NodeRef) else self.index(node)
        if isinstance(node, NodeRef) and not 0 <= u < self.n:
            raise NodeNotFound(node.label)

        def total(nbrs):
            if weighted:
                return sum(nbrs.values())
            return len(nbrs)

        if not self.directed:
            d = total(self._succ[u])
            # a self-loop contributes twice to an undirected degree
            if u in self._succ[u]:
                d += self._succ[u][u] if weighted else 1
            return float(d) if weighted else d
        if mode == "out":
            return total(self._succ[u])
        if mode == "in":
            return total(self._pred[u])
        return total(self._succ[u]) + total(self._pred[u])

    def arcs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directed arc arrays (src, dst, weight) sorted by (src, dst).

        Undirected edges appear in both directions; a self-loop appears once.
        """
        src, dst, w = [], [], []
        for u, nbrs in enumerate(self._succ):
            for v in sorted(nbrs):
                src.append(u)
                dst.append(v)
                w.append(nbrs[v])
        return (np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64),
                np.asarray(w, dtype=float))

    def adjacency_lists(self) -> list[list[int]]:
        """Out-neighbor index lists (all neighbors when undirected)."""
        return [sorted(nbrs) for nbrs in self._succ]

    def copy(self) -> "Graph":
        return Graph.from_dict(self.to_dict())

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "directed": self.directed,
            "nodes": [{"label": lab, "attrs": dict(self._node_attrs[i])}
                      for i, lab in enumerate(self._labels)],
            "edges": [{"source": e.source.label, "target": e.target.label,
                       "weight": e.weight, "attrs": dict(e.attrs)} for e in self.edges()],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Graph":
        try:
            g = cls(directed=bool(doc["directed"]))
            for nd in doc["nodes"]:
                g.add_node(nd["label"], nd.get("attrs") or {})
            for ed in doc["edges"]:
                g.add_edge(ed["source"], ed["target"], ed.get("weight", 1.0), ed.get("attrs") or {})
        except (KeyError, TypeError) as exc:
            raise FormatError(f"invalid graph document: {exc}") from exc
        return g

    def save_json(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=1) + "\n"

    @classmethod
    def load_json(cls, path) -> "Graph":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"not a JSON graph file: {exc.msg}", path=path, line=exc.lineno) from exc
        return cls.from_dict(doc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"<Graph {kind} n={self.n} m={self.number_of_edges()}>"


@dataclass
class StructureStats:
    degree_histogram: dict[int, int]
    avg_shortest_path_length: float
    path_length_defined: bool
    component_count: int
    largest_component_size: int


def weak_components(graph: Graph) -> list[list[int]]:
    """Weakly connected components, each sorted, ordered by smallest member."""
    n = graph.n
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [], deque([s])
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in list(graph.out_weights(u)) + list(graph.in_weights(u)):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def bfs_distances(adj: list[list[int]], source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def structure_stats(graph: Graph) -> StructureStats:
    """Degree histogram plus hop-count path length over the largest weak component.

    The average runs over ordered pairs (u, v), u != v, with v reachable from u.
    When no such pair exists the length is reported as 0 and flagged undefined.
    """
    if graph.n == 0:
        raise ValidationError("structure_stats needs a non-empty graph")
    degrees = [graph.degree(nd, "all") for nd in graph.nodes()]
    counts = Counter(degrees)
    histogram = {d: counts[d] for d in range(max(degrees) + 1) if counts[d]}

    comps = weak_components(graph)
    largest = max(comps, key=len)  # first of equal size = smallest member
    adj = graph.adjacency_lists()
    total = pairs = 0
    for s in largest:
        for v, d in bfs_distances(adj, s).items():
            if v != s:
                total += d
                pairs += 1
    avg = total / pairs if pairs else 0.0
    return StructureStats(histogram, avg, pairs > 0, len(comps), len(largest))
