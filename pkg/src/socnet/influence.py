"""Seed-set selection for influence maximization under Independent Cascade.

Every method scores candidate sets against the same pre-drawn cascades
(run ``r`` uses the coin flips of ``diffusion.live_arcs(p, seed, r)``),
so comparisons between sets are paired and greedy gains are never
negative. ``ReachSample`` holds, per run, which nodes each single seed
reaches within the step limit; a seed set reaches the union of its
members' rows.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import centrality
from .diffusion import DiffusionConfig, SpreadEstimate, arc_probabilities, estimate_spread, live_arcs
from .errors import BudgetCapExceeded, ValidationError
from .graph import Graph

log = logging.getLogger(__name__)

HEURISTICS = ("degree", "weighted_degree", "pagerank", "eigenvector", "closeness", "betweenness")
METHODS = HEURISTICS + ("greedy", "brute_force", "random")

DEFAULT_BRUTE_FORCE_CAP = 20_000_000
# upper bound on run x node x node cells held in memory at once
_REACH_CHUNK_CELLS = 40_000_000


@dataclass
class SeedSelection:
    method: str
    budget: int
    seeds: list[str]
    estimate: SpreadEstimate
    holdout: SpreadEstimate | None = None
    evaluations: int = 0
    seconds: float = 0.0

    def to_csv_row(self) -> list:
        return [self.method, self.budget, ";".join(self.seeds),
                repr(self.estimate.mean_coverage), repr(self.estimate.stderr)]


SELECTION_HEADER = ["method", "budget", "seeds", "mean_coverage", "stderr"]


def selections_to_csv(selections) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SELECTION_HEADER)
    for sel in selections:
        w.writerow(sel.to_csv_row())
    return buf.getvalue()


@dataclass
class CoverageCurve:
    rows: list[tuple[str, int, float, float]] = field(default_factory=list)

    def for_method(self, method: str) -> list[tuple[int, float, float]]:
        return [(b, m, s) for meth, b, m, s in self.rows if meth == method]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "budget", "mean_coverage", "stderr"])
        for method, budget, mean, se in self.rows:
            w.writerow([method, budget, repr(mean), repr(se)])
        return buf.getvalue()


def _require_ic(config: DiffusionConfig):
    if not config.is_ic:
        raise ValidationError("seed selection is only defined for the IC models")


def _reach_chunk(p, src, dst, n, steps, rng_seed, run_indices):
    out = np.empty((len(run_indices), n, n), dtype=bool)
    eye = np.eye(n, dtype=np.float32)
    for i, r in enumerate(run_indices):
        live = live_arcs(p, rng_seed, r)
        adj = np.zeros((n, n), dtype=np.float32)
        adj[src[live], dst[live]] = 1.0
        reach = eye.copy()
        for _ in range(steps):
            nxt = np.minimum(reach + reach @ adj, 1.0)
            if np.array_equal(nxt, reach):
                break
            reach = nxt
        out[i] = reach > 0
    return out


class ReachSample:
    """Step-limited single-seed reach sets for ``config.runs`` sampled cascades.

    ``reach[r, s, v]`` is True when ``v`` is active by the last step of run
    ``r`` given the lone seed ``s``.
    """

    def __init__(self, graph: Graph, config: DiffusionConfig, jobs: int = 1, run_offset: int = 0):
        _require_ic(config)
        self.graph = graph
        self.config = config
        n = graph.n
        src, dst, p = arc_probabilities(graph, config)
        indices = list(range(run_offset, run_offset + config.runs))
        per_chunk = max(1, _REACH_CHUNK_CELLS // max(n * n, 1))
        chunks = [indices[i:i + per_chunk] for i in range(0, len(indices), per_chunk)]
        args = (p, src, dst, n, config.steps, config.rng_seed)
        if jobs > 1 and len(chunks) > 1:
            with ProcessPoolExecutor(jobs) as pool:
                parts = list(pool.map(_reach_chunk, *zip(*[args + (c,) for c in chunks])))
        else:
            parts = [_reach_chunk(*args, c) for c in chunks]
        self.reach = np.concatenate(parts) if parts else np.zeros((0, n, n), dtype=bool)

    @property
    def runs(self) -> int:
        return self.reach.shape[0]

    def union(self, seed_idx) -> np.ndarray:
        """Per-run active masks, shape (runs, n)."""
        idx = list(seed_idx)
        if not idx:
            return np.zeros((self.runs, self.graph.n), dtype=bool)
        return self.reach[:, idx, :].any(axis=1)

    def counts(self, seed_idx) -> np.ndarray:
        return self.union(seed_idx).sum(axis=1)

    def estimate(self, seed_idx) -> SpreadEstimate:
        return SpreadEstimate.from_counts(self.counts(seed_idx), self.graph.n)


def _lex_best(labels_of, totals, candidates):
    """Candidate with the largest total; ties go to the lexicographically smallest labels."""
    best = max(totals[c] for c in candidates)
    return min((c for c in candidates if totals[c] == best), key=labels_of)


def select_by_centrality(graph: Graph, measure: str, budget: int,
                         config: DiffusionConfig | None = None, jobs: int = 1,
                         **params) -> SeedSelection:
    config = config or DiffusionConfig()
    if budget < 1:
        raise ValidationError("budget must be >= 1")
    t0 = time.perf_counter()
    result = centrality.compute(graph, measure, **params)
    seeds = [label for label, _ in centrality.top_k(result, min(budget, graph.n))]
    est = estimate_spread(graph, seeds, config, jobs=jobs)
    return SeedSelection(measure, budget, seeds, est, evaluations=1,
                         seconds=time.perf_counter() - t0)


def select_greedy(graph: Graph, budget: int, config: DiffusionConfig | None = None,
                  jobs: int = 1, sample: ReachSample | None = None,
                  holdout: bool = False) -> SeedSelection:
    """Hill climbing on estimated spread, one node per round.

    All rounds score candidates on one shared set of sampled cascades, so the
    marginal gain of any node is non-negative and coverage never drops as the
    budget grows.
    """
    config = config or DiffusionConfig()
    _require_ic(config)
    if budget < 1:
        raise ValidationError("budget must be >= 1")
    t0 = time.perf_counter()
    sample = sample or ReachSample(graph, config, jobs)
    n = graph.n
    chosen: list[int] = []
    current = np.zeros((sample.runs, n), dtype=bool)
    evaluations = 0
    for _ in range(min(budget, n)):
        totals = (current[:, None, :] | sample.reach).sum(axis=(0, 2))
        candidates = [v for v in range(n) if v not in chosen]
        evaluations += len(candidates)
        pick = _lex_best(graph.label, totals, candidates)
        chosen.append(pick)
        current |= sample.reach[:, pick, :]
    seeds = [graph.label(v) for v in chosen]
    est = SpreadEstimate.from_counts(current.sum(axis=1), n)
    sel = SeedSelection("greedy", budget, seeds, est, evaluations=evaluations,
                        seconds=time.perf_counter() - t0)
    if holdout:
        sel.holdout = estimate_spread(graph, seeds, config, run_offset=config.runs, jobs=jobs)
    return sel


def select_brute_force(graph: Graph, budget: int, config: DiffusionConfig | None = None,
                       max_evaluations: int = DEFAULT_BRUTE_FORCE_CAP, jobs: int = 1,
                       sample: ReachSample | None = None, holdout: bool = False) -> SeedSelection:
    """Score every seed set of size 1 or 2 and keep the best.

    The cost is C(n, budget) x runs cascade evaluations; larger budgets are
    refused because the search space explodes.
    """
    config = config or DiffusionConfig()
    _require_ic(config)
    if budget not in (1, 2):
        raise ValidationError("brute-force search supports budgets 1 and 2 only")
    n = graph.n
    k = min(budget, n)
    required = math.comb(n, k) * config.runs
    if required > max_evaluations:
        raise BudgetCapExceeded(required, max_evaluations)
    t0 = time.perf_counter()
    sample = sample or ReachSample(graph, config, jobs)
    labels = graph.labels
    reach = sample.reach

    if k == 1:
        totals = reach.sum(axis=(0, 2))
        best = _lex_best(graph.label, totals, range(n))
        pick = [best]
    else:
        best_total, pick = -1, None
        for a in range(n - 1):
            totals = (reach[:, a:a + 1, :] | reach[:, a + 1:, :]).sum(axis=(0, 2))
            for off in np.flatnonzero(totals == totals.max()):
                b = a + 1 + int(off)
                cand = (int(totals[off]), sorted((labels[a], labels[b])))
                if pick is None or cand[0] > best_total or (
                        cand[0] == best_total and cand[1] < sorted(labels[i] for i in pick)):
                    best_total, pick = cand[0], [a, b]
    seeds = sorted((labels[i] for i in pick))
    est = sample.estimate([graph.index(s) for s in seeds])
    sel = SeedSelection("brute_force", budget, seeds, est, evaluations=required,
                        seconds=time.perf_counter() - t0)
    log.info("brute force budget=%d: %d evaluations in %.2fs", budget, required, sel.seconds)
    if holdout:
        sel.holdout = estimate_spread(graph, seeds, config, run_offset=config.runs, jobs=jobs)
    return sel


def random_baseline(graph: Graph, budget: int, config: DiffusionConfig | None = None,
                    jobs: int = 1, sample: ReachSample | None = None) -> SpreadEstimate:
    """Coverage of a uniformly random seed set, redrawn for every run."""
    config = config or DiffusionConfig()
    sample = sample or ReachSample(graph, config, jobs)
    n = graph.n
    k = min(budget, n)
    counts = np.empty(sample.runs, dtype=np.int64)
    for r in range(sample.runs):
        rng = np.random.default_rng([config.rng_seed, r, k, 1])
        picks = rng.choice(n, size=k, replace=False)
        counts[r] = sample.reach[r, picks, :].any(axis=0).sum()
    return SpreadEstimate.from_counts(counts, n)


def select_random(graph: Graph, budget: int, config: DiffusionConfig | None = None,
                  jobs: int = 1) -> SeedSelection:
    """One random seed set (from ``rng_seed``) scored like the other methods."""
    config = config or DiffusionConfig()
    k = min(budget, graph.n)
    picks = np.random.default_rng([config.rng_seed, 0, k, 2]).choice(graph.n, size=k, replace=False)
    seeds = sorted(graph.label(int(i)) for i in picks)
    return SeedSelection("random", budget, seeds, estimate_spread(graph, seeds, config, jobs=jobs),
                         evaluations=1)


def select(graph: Graph, method: str, budget: int, config: DiffusionConfig | None = None,
           jobs: int = 1, **kwargs) -> SeedSelection:
    if method in HEURISTICS:
        return select_by_centrality(graph, method, budget, config, jobs)
    if method == "greedy":
        return select_greedy(graph, budget, config, jobs, **kwargs)
    if method == "brute_force":
        return select_brute_force(graph, budget, config, jobs=jobs, **kwargs)
    if method == "random":
        return select_random(graph, budget, config, jobs)
    raise ValidationError(f"unknown method {method!r}; choose from {METHODS}")


def coverage_curve(graph: Graph, methods, budgets, config: DiffusionConfig | None = None,
                   jobs: int = 1, max_evaluations: int = DEFAULT_BRUTE_FORCE_CAP) -> CoverageCurve:
    """Coverage per (method, budget), all scored on one shared cascade sample.

    ``random`` is the baseline averaged over a fresh random seed set per run.
    """
    config = config or DiffusionConfig()
    _require_ic(config)
    budgets = sorted(set(int(b) for b in budgets))
    if not budgets:
        raise ValidationError("budgets must be non-empty")
    if budgets[0] < 1:
        raise ValidationError("budgets must be >= 1")
    for m in methods:
        if m not in METHODS:
            raise ValidationError(f"unknown method {m!r}; choose from {METHODS}")
    sample = ReachSample(graph, config, jobs)
    curve = CoverageCurve()
    for method in methods:
        if method == "random":
            for b in budgets:
                est = random_baseline(graph, b, config, sample=sample)
                curve.rows.append((method, b, est.mean_coverage, est.stderr))
        elif method == "greedy":
            sel = select_greedy(graph, budgets[-1], config, sample=sample)
            for b in budgets:
                est = sample.estimate([graph.index(s) for s in sel.seeds[:b]])
                curve.rows.append((method, b, est.mean_coverage, est.stderr))
        elif method == "brute_force":
            for b in budgets:
                if b > 2:
                    continue
                est = select_brute_force(graph, b, config, max_evaluations, sample=sample).estimate
                curve.rows.append((method, b, est.mean_coverage, est.stderr))
        else:
            ranked = centrality.top_k(centrality.compute(graph, method), graph.n)
            for b in budgets:
                est = sample.estimate([graph.index(lab) for lab, _ in ranked[:b]])
                curve.rows.append((method, b, est.mean_coverage, est.stderr))
    return curve
