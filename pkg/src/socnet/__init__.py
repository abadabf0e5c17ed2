"""Social network analysis toolkit: graphs from CSV, centrality, diffusion, seeding."""

__version__ = "0.1.0"

from .centrality import (CentralityResult, betweenness_centrality, closeness_centrality,
                         degree_centrality, eigenvector_centrality, pagerank, top_k)
from .diffusion import (DiffusionConfig, SpreadEstimate, estimate_spread, ic_step, lt_step,
                        run_simulation)
from .errors import (BudgetCapExceeded, ConvergenceError, FormatError, ModelError, NodeNotFound,
                     SocnetError, ValidationError)
from .graph import Edge, Graph, NodeRef, StructureStats, structure_stats
from .ingest import load_edge_list, load_positions, load_votes_matrix
from .influence import (CoverageCurve, ReachSample, SeedSelection, coverage_curve,
                        select_brute_force, select_by_centrality, select_greedy)

__all__ = [
    "BudgetCapExceeded", "CentralityResult", "ConvergenceError", "CoverageCurve", "DiffusionConfig",
    "Edge", "FormatError", "Graph", "ModelError", "NodeNotFound", "NodeRef", "ReachSample",
    "SeedSelection", "SocnetError", "SpreadEstimate", "StructureStats", "ValidationError",
    "betweenness_centrality", "closeness_centrality", "coverage_curve", "degree_centrality",
    "eigenvector_centrality", "estimate_spread", "ic_step", "load_edge_list", "load_positions",
    "load_votes_matrix", "lt_step", "pagerank", "run_simulation", "select_brute_force",
    "select_by_centrality", "select_greedy", "structure_stats", "top_k",
]
