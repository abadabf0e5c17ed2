"""Independent Cascade and Linear Threshold diffusion.

Two IC code paths exist on purpose:

* ``ic_step`` / ``run_simulation`` follow the step-by-step rule: every node
  activated at time ``t`` tries each inactive neighbour once, drawing a fresh
  uniform number per attempt.
* ``estimate_spread`` (and the influence module) pre-draw one coin per arc
  for each run and take the step-limited breadth-first reach of the seeds
  over the arcs whose coin came up. Drawing a coin up front or at the time
  of the attempt gives the same distribution, and the pre-drawn form lets
  every candidate seed set be scored against identical random outcomes.

Randomness: run ``r`` of a configuration with seed ``s`` uses
``numpy.random.default_rng([s, r])`` (PCG64 fed by a SeedSequence), so runs
are independent streams and can be executed in any order or process.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, ValidationError
from .graph import Graph

MODELS = ("ic_maxw", "ic_prob", "lt")

InfectionTimes = dict  # label -> activation time


@dataclass
class DiffusionConfig:
    model: str = "ic_maxw"
    steps: int = 10
    rng_seed: int = 0
    runs: int = 1000
    # None draws a uniform threshold per node and run; a float fixes it
    lt_threshold: float | None = None
    lt_normalize: bool = True
    prob_attr: str = "p"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValidationError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.steps < 1:
            raise ValidationError("steps must be >= 1")
        if self.runs < 1:
            raise ValidationError("runs must be >= 1")
        if self.rng_seed < 0:
            raise ValidationError("rng_seed must be unsigned")
        if self.lt_threshold is not None and not 0.0 <= self.lt_threshold <= 1.0:
            raise ValidationError("fixed LT threshold must lie in [0, 1]")

    @property
    def is_ic(self) -> bool:
        return self.model != "lt"


@dataclass
class SpreadEstimate:
    mean_coverage: float
    stderr: float
    runs: int

    @classmethod
    def from_samples(cls, coverage) -> "SpreadEstimate":
        cov = np.asarray(coverage, dtype=float)
        runs = len(cov)
        stderr = float(cov.std(ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0
        return cls(float(cov.mean()), stderr, runs)

    @classmethod
    def from_counts(cls, counts, n: int) -> "SpreadEstimate":
        """Estimate from per-run activated-node counts out of ``n`` nodes."""
        c = np.asarray(counts, dtype=np.int64)
        runs = len(c)
        mean = float(c.sum()) / (runs * n)
        stderr = float(c.std(ddof=1) / n / math.sqrt(runs)) if runs > 1 else 0.0
        return cls(mean, stderr, runs)

    def combine(self, other: "SpreadEstimate") -> "SpreadEstimate":
        """Pool two independent estimates (count-weighted mean and variance)."""
        n1, n2 = self.runs, other.runs
        n = n1 + n2
        m2_a = (self.stderr ** 2) * n1 * (n1 - 1)
        m2_b = (other.stderr ** 2) * n2 * (n2 - 1)
        delta = other.mean_coverage - self.mean_coverage
        mean = self.mean_coverage + delta * n2 / n
        m2 = m2_a + m2_b + delta ** 2 * n1 * n2 / n
        stderr = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
        return SpreadEstimate(mean, stderr, n)

    def interval(self, z: float = 1.96) -> tuple[float, float]:
        return (self.mean_coverage - z * self.stderr, self.mean_coverage + z * self.stderr)

    def to_csv(self) -> str:
        return f"mean_coverage,stderr,runs\n{self.mean_coverage!r},{self.stderr!r},{self.runs}\n"


def run_rng(rng_seed: int, run_index: int) -> np.random.Generator:
    return np.random.default_rng([rng_seed, run_index])


def arc_probabilities(graph: Graph, config: DiffusionConfig):
    """Arc arrays (src, dst, p) with activation probabilities for IC models."""
    src, dst, w = graph.arcs()
    if config.model == "ic_maxw":
        max_w = float(w.max()) if len(w) else 0.0
        if max_w <= 0:
            raise ModelError("ic_maxw needs a positive maximum edge weight")
        p = w / max_w
    elif config.model == "ic_prob":
        p = np.array([float(graph.edge_attrs(graph.label(u), graph.label(v)).get(config.prob_attr, wt))
                      for u, v, wt in zip(src, dst, w)])
        if ((p < 0) | (p > 1)).any():
            raise ModelError(f"edge attribute {config.prob_attr!r} must hold probabilities in [0, 1]")
    else:
        raise ModelError("arc probabilities only apply to IC models")
    return src, dst, p


def _ic_table(graph: Graph, config: DiffusionConfig) -> list[list[tuple[int, float]]]:
    src, dst, p = arc_probabilities(graph, config)
    table = [[] for _ in range(graph.n)]
    for u, v, pr in zip(src.tolist(), dst.tolist(), p.tolist()):
        table[u].append((v, pr))
    return table


def ic_step(graph: Graph, t: int, infection_times: InfectionTimes, rng,
            config: DiffusionConfig | None = None, _table=None) -> InfectionTimes:
    """One IC time step, updating ``infection_times`` in place.

    Only nodes whose time equals ``t`` attempt; each inactive neighbour joins
    at ``t + 1`` with the arc's probability (``weight / max weight`` under the
    default model). Seeds recorded with a time below the first simulated
    step therefore never spread.
    """
    table = _table if _table is not None else _ic_table(graph, config or DiffusionConfig())
    current = sorted((graph.index(lab) for lab, tt in infection_times.items() if tt == t))
    for u in current:
        for v, p in table[u]:
            lab = graph.label(v)
            if lab not in infection_times and rng.random() < p:
                infection_times[lab] = t + 1
    return infection_times


def lt_in_weights(graph: Graph, normalize: bool = True) -> list[dict[int, float]]:
    """Incoming influence weights per node, optionally scaled to sum to one."""
    table = []
    for v in range(graph.n):
        inw = dict(graph.in_weights(v))
        if normalize:
            total = sum(inw.values())
            inw = {u: (w / total if total > 0 else 0.0) for u, w in inw.items()}
        table.append(inw)
    return table


def lt_step(graph: Graph, t: int, active: set, thresholds: Mapping[str, float],
            normalize: bool = True, _weights=None) -> set:
    """Return the active set at ``t + 1``.

    An inactive node joins once the summed weight from its active in-neighbours
    reaches its threshold. A node needs at least one active in-neighbour, so a
    zero threshold means "activate on first exposure" rather than "always".
    """
    weights = _weights if _weights is not None else lt_in_weights(graph, normalize)
    active_idx = {graph.index(lab) for lab in active}
    new = set(active)
    for v in range(graph.n):
        if v in active_idx:
            continue
        influence = [w for u, w in weights[v].items() if u in active_idx]
        if influence and math.fsum(influence) >= thresholds[graph.label(v)]:
            new.add(graph.label(v))
    return new


def _normalize_seeds(graph: Graph, seeds) -> dict[str, int]:
    if isinstance(seeds, Mapping):
        times = {lab: int(t) for lab, t in seeds.items()}
    elif isinstance(seeds, str):
        times = {seeds: 0}
    else:
        times = {lab: 0 for lab in seeds}
    if not times:
        raise ValidationError("at least one seed is required")
    for lab in times:
        graph.index(lab)
    return times


def run_simulation(graph: Graph, seeds, config: DiffusionConfig | None = None,
                   run_index: int = 0) -> InfectionTimes:
    """Simulate steps ``0 .. steps-1`` and return node -> activation time.

    ``seeds`` is either an iterable of labels (all start at time 0) or a
    mapping label -> start time; negative start times are kept as given.
    """
    config = config or DiffusionConfig()
    times = _normalize_seeds(graph, seeds)
    rng = run_rng(config.rng_seed, run_index)
    if config.is_ic:
        table = _ic_table(graph, config)
        for t in range(config.steps):
            ic_step(graph, t, times, rng, _table=table)
        return times

    weights = lt_in_weights(graph, config.lt_normalize)
    if config.lt_threshold is None:
        draws = rng.random(graph.n)
        thresholds = {lab: float(draws[i]) for i, lab in enumerate(graph.labels)}
    else:
        thresholds = dict.fromkeys(graph.labels, config.lt_threshold)
    for t in range(config.steps):
        active = {lab for lab, tt in times.items() if tt <= t}
        for lab in lt_step(graph, t, active, thresholds, _weights=weights) - active:
            times[lab] = t + 1
    return times


# -- Monte-Carlo spread --------------------------------------------------


def _csr(graph: Graph, config: DiffusionConfig):
    src, dst, p = arc_probabilities(graph, config)
    indptr = np.zeros(graph.n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    return np.cumsum(indptr), dst, p


def live_arcs(p: np.ndarray, rng_seed: int, run_index: int) -> np.ndarray:
    """Coin flips for every arc in run ``run_index`` (arc order of ``Graph.arcs``)."""
    return run_rng(rng_seed, run_index).random(len(p)) < p


def _ic_counts(indptr, dst, p, n, seed_idx, steps, rng_seed, run_indices):
    indptr = indptr.tolist()
    dst_l = dst.tolist()
    out = []
    for r in run_indices:
        live = live_arcs(p, rng_seed, r).tolist()
        active = [False] * n
        for s in seed_idx:
            active[s] = True
        frontier = list(seed_idx)
        count = len(frontier)
        for _ in range(steps):
            nxt = []
            for u in frontier:
                for k in range(indptr[u], indptr[u + 1]):
                    if live[k]:
                        v = dst_l[k]
                        if not active[v]:
                            active[v] = True
                            nxt.append(v)
            if not nxt:
                break
            count += len(nxt)
            frontier = nxt
        out.append(count)
    return out


def _lt_counts(graph, seeds, config, run_indices):
    return [len(run_simulation(graph, seeds, config, run_index=r)) for r in run_indices]


def _chunks(indices: list[int], parts: int) -> list[list[int]]:
    size = max(1, math.ceil(len(indices) / parts))
    return [indices[i:i + size] for i in range(0, len(indices), size)]


def coverage_counts(graph: Graph, seeds: Iterable[str], config: DiffusionConfig,
                    run_offset: int = 0, jobs: int = 1) -> np.ndarray:
    """Per-run activated-node counts for seeds entering at time 0."""
    seeds = sorted(set(_normalize_seeds(graph, list(seeds))), key=graph.index)
    indices = list(range(run_offset, run_offset + config.runs))
    n = graph.n
    if config.is_ic:
        indptr, dst, p = _csr(graph, config)
        seed_idx = [graph.index(s) for s in seeds]
        args = (indptr, dst, p, n, seed_idx, config.steps, config.rng_seed)
        if jobs > 1 and len(indices) > 1:
            with ProcessPoolExecutor(jobs) as pool:
                parts = pool.map(_ic_counts, *zip(*[args + (c,) for c in _chunks(indices, jobs)]))
                counts = [c for part in parts for c in part]
        else:
            counts = _ic_counts(*args, indices)
    else:
        seed_times = dict.fromkeys(seeds, 0)
        if jobs > 1 and len(indices) > 1:
            chunks = _chunks(indices, jobs)
            with ProcessPoolExecutor(jobs) as pool:
                parts = pool.map(_lt_counts, [graph] * len(chunks), [seed_times] * len(chunks),
                                 [config] * len(chunks), chunks)
                counts = [c for part in parts for c in part]
        else:
            counts = _lt_counts(graph, seed_times, config, indices)
    return np.asarray(counts, dtype=np.int64)


def coverage_samples(graph: Graph, seeds: Iterable[str], config: DiffusionConfig,
                     run_offset: int = 0, jobs: int = 1) -> np.ndarray:
    """Per-run coverage fractions."""
    return coverage_counts(graph, seeds, config, run_offset, jobs) / graph.n


def estimate_spread(graph: Graph, seeds: Iterable[str], config: DiffusionConfig | None = None,
                    run_offset: int = 0, jobs: int = 1) -> SpreadEstimate:
    """Mean final coverage (seeds included) and its standard error over ``config.runs`` runs."""
    config = config or DiffusionConfig()
    return SpreadEstimate.from_counts(coverage_counts(graph, seeds, config, run_offset, jobs), graph.n)


# -- CSV helpers ---------------------------------------------------------


def trace_to_csv(graph: Graph, times: InfectionTimes) -> str:
    """``node,activation_time`` for every node; never-activated nodes get an empty cell."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node", "activation_time"])
    for lab in graph.labels:
        w.writerow([lab, times.get(lab, "")])
    return buf.getvalue()


def trace_from_csv(text: str) -> InfectionTimes:
    rows = csv.DictReader(io.StringIO(text))
    return {r["node"]: int(r["activation_time"]) for r in rows if r["activation_time"] != ""}
