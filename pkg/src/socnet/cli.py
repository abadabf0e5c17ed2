"""Command-line front end: ingest -> analyse -> export over JSON graph files.

Every command that writes an output also writes ``<output>.manifest.json``
holding the resolved argument vector, input digests and rng seed;
``socnet replay <manifest>`` re-runs it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import secrets
import sys
import time
from pathlib import Path

from . import __version__, centrality, diffusion, export, influence, ingest
from .errors import (BudgetCapExceeded, ConvergenceError, FormatError, ModelError, NodeNotFound,
                     SocnetError, ValidationError)
from .graph import Graph, structure_stats

log = logging.getLogger("socnet")

EXIT_OK, EXIT_ANALYSIS, EXIT_USAGE = 0, 1, 2


class UsageError(SocnetError):
    pass


def _csv_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_seed_spec(text: str) -> dict[str, int]:
    """``A,B`` -> all at time 0; ``A:0,B:-1`` sets explicit start times."""
    seeds = {}
    for part in _csv_list(text):
        label, sep, t = part.rpartition(":")
        if sep and label:
            try:
                seeds[label] = int(t)
                continue
            except ValueError:
                pass
        seeds[part] = 0
    if not seeds:
        raise UsageError("--seeds needs at least one node label")
    return seeds


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--graph", help="graph JSON file produced by `ingest`")
    g.add_argument("-o", "--output", help="output file (stdout when omitted, no manifest)")
    g.add_argument("--rng-seed", type=int, help="seed for all randomness (random and logged if omitted)")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for Monte-Carlo runs")
    g.add_argument("--quiet", action="store_true")
    return p


def _sim_options(p: argparse.ArgumentParser, default_runs: int):
    p.add_argument("--model", default="ic", choices=["ic", "ic_maxw", "ic_prob", "lt"],
                   help="ic = ic_maxw: activation probability weight / max weight")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--runs", type=int, default=default_runs)
    p.add_argument("--lt-threshold", type=float, help="fixed LT threshold (default: uniform per run)")
    p.add_argument("--lt-raw", action="store_true", help="use raw incoming weights in LT")
    p.add_argument("--prob-attr", default="p", help="edge attribute holding ic_prob probabilities")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="socnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"socnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="CSV -> graph JSON")
    p.add_argument("--format", required=True, choices=["edgelist", "votes"])
    p.add_argument("--input", required=True)
    d = p.add_mutually_exclusive_group()
    d.add_argument("--directed", dest="directed", action="store_true", default=None)
    d.add_argument("--undirected", dest="directed", action="store_false")
    p.add_argument("--id-columns", default=",".join(ingest.DEFAULT_ID_COLUMNS),
                   help="votes matrix id columns (comma-separated)")
    p.add_argument("--positions", help="node,x,y CSV to attach")

    p = sub.add_parser("centrality", parents=[common], help="node centrality scores")
    p.add_argument("--measure", required=True, choices=centrality.MEASURES)
    p.add_argument("--top", type=int)
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--unweighted", action="store_true", help="pagerank/eigenvector ignore weights")
    p.add_argument("--raw", action="store_true", help="unnormalized betweenness")

    p = sub.add_parser("simulate", parents=[common], help="diffusion trace or spread estimate")
    p.add_argument("--seeds", required=True, help="labels, optionally label:time")
    _sim_options(p, default_runs=1)
    p.add_argument("--spread", action="store_true", help="write the spread estimate even for one run")

    p = sub.add_parser("maximize", parents=[common], help="influence-maximizing seed selection")
    p.add_argument("--method", default="degree",
                   help=f"one of {', '.join(m.replace('_', '-') for m in influence.METHODS)}")
    p.add_argument("--budget", type=int, default=1)
    p.add_argument("--budgets", type=_int_list, help="coverage curve over these budgets")
    p.add_argument("--methods", help="coverage curve methods (comma-separated)")
    p.add_argument("--max-evaluations", type=int, default=influence.DEFAULT_BRUTE_FORCE_CAP)
    p.add_argument("--holdout", action="store_true",
                   help="re-estimate greedy/brute-force picks on fresh runs (logged)")
    _sim_options(p, default_runs=1000)

    p = sub.add_parser("export", parents=[common], help="GraphML / DOT / SVG")
    p.add_argument("--format", required=True, choices=["graphml", "dot", "svg"])
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=600)
    p.add_argument("--divisor", type=float, default=24.0, help="edge width = weight / divisor")
    p.add_argument("--node-size", default="fixed", choices=["fixed", "weighted_in_degree"])
    p.add_argument("--edge-styles", default="", help="bound:style pairs, e.g. 0.33:dotted,0.66:dashed")
    p.add_argument("--color-attr", help="node attribute holding a color")
    p.add_argument("--trace", help="activation trace CSV from `simulate`")
    p.add_argument("--times", type=_int_list, help="frames to render (one SVG per time)")

    sub.add_parser("stats", parents=[common], help="degree histogram and path length")

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    return parser


# -- helpers -------------------------------------------------------------


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_graph(args) -> Graph:
    if not args.graph:
        raise UsageError("--graph is required")
    path = Path(args.graph)
    if not path.exists():
        raise FormatError("graph file not found", path=path)
    if path.suffix.lower() == ".graphml":
        return export.load_graphml(path)
    return Graph.load_json(path)


def _config(args, rng_seed: int) -> diffusion.DiffusionConfig:
    model = "ic_maxw" if args.model == "ic" else args.model
    return diffusion.DiffusionConfig(model=model, steps=args.steps, rng_seed=rng_seed, runs=args.runs,
                                     lt_threshold=args.lt_threshold, lt_normalize=not args.lt_raw,
                                     prob_attr=args.prob_attr)


def _method(name: str) -> str:
    m = name.replace("-", "_")
    if m not in influence.METHODS:
        raise UsageError(f"unknown method {name!r}")
    return m


# -- commands: each returns ({path or None: text}, inputs, parameters) ----


def cmd_ingest(args, rng_seed):
    report = ingest.IngestReport()
    directed = args.directed
    if args.format == "votes":
        if directed is False:
            raise UsageError("the votes matrix always yields a directed graph")
        g = ingest.load_votes_matrix(args.input, _csv_list(args.id_columns), report=report)
    else:
        g = ingest.load_edge_list(args.input, directed=bool(directed), report=report)
    inputs = [args.input]
    if args.positions:
        ingest.load_positions(args.positions, g, report)
        inputs.append(args.positions)
        if report.unmatched:
            log.warning("positions for unknown nodes: %s", ", ".join(report.unmatched))
    log.info("%s: %d nodes, %d edges (%d duplicates overwritten)", args.input, g.n,
             g.number_of_edges(), report.duplicates)
    return {args.output: g.dumps()}, inputs, {"nodes": g.n, "edges": g.number_of_edges()}


def cmd_centrality(args, rng_seed):
    g = _load_graph(args)
    params = {}
    if args.measure in ("pagerank", "eigenvector"):
        params["weighted"] = not args.unweighted
        if args.tol is not None:
            params["tol"] = args.tol
        if args.max_iter is not None:
            params["max_iter"] = args.max_iter
    if args.measure == "pagerank":
        params["damping"] = args.damping
    if args.measure == "betweenness":
        params["normalized"] = not args.raw
    result = centrality.compute(g, args.measure, **params)
    if args.top is not None and args.top < 1:
        raise UsageError("--top must be >= 1")
    return {args.output: result.to_csv(args.top)}, [args.graph], result.params


def cmd_simulate(args, rng_seed):
    g = _load_graph(args)
    config = _config(args, rng_seed)
    seeds = parse_seed_spec(args.seeds)
    for label in seeds:
        g.index(label)
    if config.runs == 1 and not args.spread:
        times = diffusion.run_simulation(g, seeds, config)
        text = diffusion.trace_to_csv(g, times)
    else:
        if any(t != 0 for t in seeds.values()):
            raise UsageError("seed start times only apply to single-run traces")
        text = diffusion.estimate_spread(g, list(seeds), config, jobs=args.jobs).to_csv()
    return {args.output: text}, [args.graph], {"seeds": seeds, "model": config.model}


def cmd_maximize(args, rng_seed):
    g = _load_graph(args)
    config = _config(args, rng_seed)
    if args.budgets:
        methods = [_method(m) for m in _csv_list(args.methods or "degree,pagerank,random")]
        curve = influence.coverage_curve(g, methods, args.budgets, config, jobs=args.jobs,
                                         max_evaluations=args.max_evaluations)
        return {args.output: curve.to_csv()}, [args.graph], {"methods": methods}
    method = _method(args.method)
    extra = {}
    if method in ("greedy", "brute_force"):
        extra["holdout"] = args.holdout
    if method == "brute_force":
        extra["max_evaluations"] = args.max_evaluations
    sel = influence.select(g, method, args.budget, config, jobs=args.jobs, **extra)
    log.info("%s budget=%d seeds=%s coverage=%.4f +/- %.4f (%.2fs)", method, args.budget,
             ";".join(sel.seeds), sel.estimate.mean_coverage, sel.estimate.stderr, sel.seconds)
    if sel.holdout is not None:
        log.info("holdout coverage=%.4f +/- %.4f", sel.holdout.mean_coverage, sel.holdout.stderr)
    return {args.output: influence.selections_to_csv([sel])}, [args.graph], {"method": method}


def _edge_styles(text: str):
    pairs = []
    for part in _csv_list(text):
        bound, _, style = part.partition(":")
        try:
            pairs.append((float(bound), style))
        except ValueError:
            raise UsageError(f"bad --edge-styles entry {part!r}") from None
    return pairs


def cmd_export(args, rng_seed):
    g = _load_graph(args)
    spec = export.RenderSpec(width=args.width, height=args.height, node_size_mode=args.node_size,
                             edge_width_divisor=args.divisor,
                             edge_style_thresholds=_edge_styles(args.edge_styles),
                             color_source=args.color_attr)
    inputs = [args.graph]
    if args.format == "graphml":
        return {args.output: export.graphml_string(g)}, inputs, {}
    if args.format == "dot":
        return {args.output: export.dot_string(g, spec)}, inputs, {}
    trace = None
    if args.trace:
        trace = diffusion.trace_from_csv(Path(args.trace).read_text(encoding="utf-8"))
        inputs.append(args.trace)
    if not args.times:
        return {args.output: export.svg_string(g, spec, trace)}, inputs, {}
    if trace is None:
        raise UsageError("--times needs --trace")
    if not args.output:
        raise UsageError("--times needs --output (frames are written as <stem>_t<k>.svg)")
    out = Path(args.output)
    docs = {str(out.with_name(f"{out.stem}_t{t}{out.suffix or '.svg'}")): export.svg_string(g, spec, trace, t)
            for t in args.times}
    return docs, inputs, {"times": args.times}


def cmd_stats(args, rng_seed):
    g = _load_graph(args)
    st = structure_stats(g)
    doc = {
        "nodes": g.n,
        "edges": g.number_of_edges(),
        "directed": g.directed,
        "component_count": st.component_count,
        "largest_component_size": st.largest_component_size,
        "avg_shortest_path_length": st.avg_shortest_path_length,
        "path_length_defined": st.path_length_defined,
        "degree_histogram": {str(k): v for k, v in st.degree_histogram.items()},
    }
    return {args.output: json.dumps(doc, indent=1) + "\n"}, [args.graph], {}


COMMANDS = {
    "ingest": cmd_ingest,
    "centrality": cmd_centrality,
    "simulate": cmd_simulate,
    "maximize": cmd_maximize,
    "export": cmd_export,
    "stats": cmd_stats,
}
RANDOMIZED = {"simulate", "maximize"}


def _write_manifest(path: Path, command, argv, rng_seed, inputs, params, seconds):
    manifest = {
        "subcommand": command,
        "argv": argv,
        "cwd": os.getcwd(),
        "parameters": params,
        "inputs": {str(p): _digest(p) for p in inputs if p},
        "rng_seed": rng_seed,
        "tool_version": __version__,
        "duration_seconds": round(seconds, 6),
    }
    Path(f"{path}.manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n",
                                             encoding="utf-8")


def replay(manifest_path) -> int:
    doc = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    prev = os.getcwd()
    os.chdir(doc.get("cwd", prev))
    try:
        for path, digest in doc.get("inputs", {}).items():
            if not Path(path).exists() or _digest(path) != digest:
                raise FormatError(f"input changed since the manifest was written: {path}")
        return main(doc["argv"])
    finally:
        os.chdir(prev)


def _run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        return replay(args.manifest)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")

    resolved = list(argv)
    rng_seed = args.rng_seed
    if args.command in RANDOMIZED and rng_seed is None:
        rng_seed = secrets.randbits(32)
        log.warning("no --rng-seed given; using %d", rng_seed)
        resolved += ["--rng-seed", str(rng_seed)]

    t0 = time.perf_counter()
    outputs, inputs, params = COMMANDS[args.command](args, rng_seed)
    seconds = time.perf_counter() - t0
    # everything is computed before the first file is written
    for path, text in outputs.items():
        if path is None:
            sys.stdout.write(text)
            continue
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
        _write_manifest(Path(path), args.command, resolved, rng_seed, inputs, params, seconds)
        if not args.quiet:
            log.info("wrote %s", path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _run(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, FormatError, NodeNotFound, ValidationError, OSError) as exc:
        print(f"socnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ModelError, BudgetCapExceeded, SocnetError) as exc:
        print(f"socnet: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
