"""CSV readers for the votes matrix, weighted edge lists and node positions."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError
from .graph import Graph

log = logging.getLogger(__name__)

DEFAULT_ID_COLUMNS = ("Rank", "Running order", "Country", "Total")


@dataclass
class IngestReport:
    rows: int = 0
    edges: int = 0
    duplicates: int = 0
    self_loops_skipped: int = 0
    matched: int = 0
    unmatched: list[str] = field(default_factory=list)


def _open_rows(path):
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}", path=path) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader, None)
            rows = [(reader.line_num, row) for row in reader]
        except (csv.Error, UnicodeDecodeError) as exc:
            raise FormatError(f"unreadable CSV: {exc}", path=path) from exc
    return header, rows


def _number(cell: str, path, line, column) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise FormatError(f"non-numeric value {cell!r}", path=path, line=line, column=column) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite value {cell!r}", path=path, line=line, column=column)
    return value


def load_votes_matrix(path, id_columns=DEFAULT_ID_COLUMNS, country_column="Country",
                      report: IngestReport | None = None) -> Graph:
    """Melt a wide votes matrix into a directed voter -> country graph.

    Each non-id column is a voting country. A cell holding a positive number
    becomes an edge ``voter -> row country`` with that weight (also stored as
    the ``points`` attribute). Empty and zero cells are dropped, as are cells
    where a country would vote for itself.
    """
    report = report if report is not None else IngestReport()
    header, rows = _open_rows(path)
    if not header:
        raise FormatError("missing header row", path=path, line=1)
    header = [h.strip() for h in header]
    for col in list(id_columns) + [country_column]:
        if col not in header:
            raise FormatError(f"missing id column {col!r}", path=path, line=1, column=col)
    country_at = header.index(country_column)
    voters = [(i, h) for i, h in enumerate(header) if h not in id_columns and h != country_column]

    g = Graph(directed=True)
    for line, row in rows:
        if not any(c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} cells, got {len(row)}", path=path, line=line)
        country = row[country_at].strip()
        if not country:
            raise FormatError("empty country name", path=path, line=line, column=country_column)
        g.add_node(country)
        report.rows += 1
        for i, voter in voters:
            cell = row[i].strip()
            if not cell or cell in ("-", "–"):
                continue
            points = _number(cell, path, line, voter)
            if points < 0:
                raise FormatError(f"negative points {cell!r}", path=path, line=line, column=voter)
            if points == 0:
                continue
            if voter == country:
                report.self_loops_skipped += 1
                continue
            if points == int(points):
                points = int(points)
            g.add_edge(voter, country, points, {"points": points})
            report.edges += 1
    log.info("melted %d rows into %d votes", report.rows, report.edges)
    return g


def load_edge_list(path, directed: bool = False, report: IngestReport | None = None) -> Graph:
    """Read a ``Source,Target,Weight`` CSV (header matched case-insensitively).

    A repeated pair overwrites the earlier weight and is counted in
    ``report.duplicates``. Self-loops are rejected.
    """
    report = report if report is not None else IngestReport()
    header, rows = _open_rows(path)
    if not header:
        raise FormatError("missing header row", path=path, line=1)
    lowered = [h.strip().lower() for h in header]
    cols = {}
    for name in ("source", "target", "weight"):
        if name not in lowered:
            raise FormatError(f"missing column {name.title()!r}", path=path, line=1, column=name.title())
        cols[name] = lowered.index(name)

    g = Graph(directed=directed)
    for line, row in rows:
        if not any(c.strip() for c in row):
            continue
        if len(row) < len(header):
            raise FormatError(f"expected {len(header)} cells, got {len(row)}", path=path, line=line)
        source = row[cols["source"]].strip()
        target = row[cols["target"]].strip()
        if not source or not target:
            raise FormatError("empty node label", path=path, line=line)
        if source == target:
            raise FormatError(f"self-loop on {source!r}", path=path, line=line)
        weight = _number(row[cols["weight"]].strip(), path, line, "Weight")
        if weight <= 0:
            raise FormatError(f"weight must be positive, got {weight}", path=path, line=line, column="Weight")
        if weight == int(weight):
            weight = int(weight)
        if g.has_edge(source, target):
            report.duplicates += 1
        g.add_edge(source, target, weight)
        report.rows += 1
    report.edges = g.number_of_edges()
    if report.duplicates:
        log.warning("%s: %d duplicate pairs overwritten", path, report.duplicates)
    return g


def load_positions(path, graph: Graph, report: IngestReport | None = None) -> Graph:
    """Attach ``x``/``y`` node attributes from a ``node,x,y`` CSV, in place.

    File rows naming nodes absent from the graph are listed in
    ``report.unmatched``; graph nodes missing from the file keep no position.
    """
    report = report if report is not None else IngestReport()
    header, rows = _open_rows(path)
    if header is None:
        return graph
    lowered = [h.strip().lower() for h in header]
    for name in ("node", "x", "y"):
        if name not in lowered:
            raise FormatError(f"missing column {name!r}", path=path, line=1, column=name)
    ni, xi, yi = (lowered.index(c) for c in ("node", "x", "y"))
    parsed = []
    for line, row in rows:
        if not any(c.strip() for c in row):
            continue
        if len(row) < len(header):
            raise FormatError(f"expected {len(header)} cells, got {len(row)}", path=path, line=line)
        parsed.append((row[ni].strip(), _number(row[xi].strip(), path, line, "x"),
                       _number(row[yi].strip(), path, line, "y")))
    # validate everything before touching the graph
    for label, x, y in parsed:
        report.rows += 1
        if label in graph:
            graph.node_attrs(label).update({"x": x, "y": y})
            report.matched += 1
        else:
            report.unmatched.append(label)
    return graph
