"""GraphML, DOT and static SVG output.

Nothing here computes a layout: SVG rendering uses the ``x``/``y`` node
attributes attached at ingest time (viewport coordinates in [0, 1], y up).
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .errors import FormatError, ValidationError
from .graph import Graph

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"

DASHES = {"solid": None, "dashed": "6,3", "dotted": "1,3", "dashdot": "6,3,1,3"}

# activation-time buckets: t=0 (seeds), 1, 2, 3, 4+
TIME_COLORS = ("#b2182b", "#ef8a62", "#fddbc7", "#67a9cf", "#2166ac")
INACTIVE_COLOR = "#d9d9d9"
DEFAULT_COLOR = "#4d4d4d"


@dataclass
class RenderSpec:
    width: int = 800
    height: int = 600
    margin: float = 40.0
    node_size_mode: str = "fixed"  # or "weighted_in_degree"
    node_radius: float = 6.0
    max_node_radius: float = 30.0
    min_node_radius: float = 1.0
    edge_width_divisor: float = 24.0
    # (upper width bound, style) pairs, checked in ascending order
    edge_style_thresholds: list = field(default_factory=list)
    color_source: str | None = None

    def __post_init__(self):
        if self.edge_width_divisor <= 0:
            raise ValidationError("edge_width_divisor must be > 0")
        if self.node_size_mode not in ("fixed", "weighted_in_degree"):
            raise ValidationError(f"unknown node_size_mode {self.node_size_mode!r}")
        bounds = [b for b, _ in self.edge_style_thresholds]
        if bounds != sorted(bounds):
            raise ValidationError("edge_style_thresholds must be sorted ascending")
        for _, style in self.edge_style_thresholds:
            if style not in DASHES:
                raise ValidationError(f"unknown edge style {style!r}; choose from {list(DASHES)}")

    def edge_width(self, weight: float) -> float:
        return weight / self.edge_width_divisor

    def edge_style(self, width: float) -> str:
        for bound, style in self.edge_style_thresholds:
            if width <= bound:
                return style
        return "solid"


# -- GraphML -------------------------------------------------------------


def _graphml_type(value) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "long"
    if isinstance(value, float):
        return "double"
    return "string"


def _graphml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def graphml_string(graph: Graph) -> str:
    """GraphML 1.0 document; node ids are the labels, weights typed as double."""
    node_keys: dict[str, str] = {}
    edge_keys: dict[str, str] = {"weight": "double"}
    for nd in graph.nodes():
        for k, v in graph.node_attrs(nd.label).items():
            node_keys.setdefault(k, _graphml_type(v))
    for e in graph.edges():
        for k, v in e.attrs.items():
            if k != "weight":
                edge_keys.setdefault(k, _graphml_type(v))

    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<graphml xmlns="{GRAPHML_NS}">']
    ids = {}
    for i, (k, t) in enumerate(sorted(node_keys.items())):
        ids[("node", k)] = f"n{i}"
        lines.append(f'  <key id="n{i}" for="node" attr.name={quoteattr(k)} attr.type="{t}"/>')
    for i, (k, t) in enumerate(sorted(edge_keys.items())):
        ids[("edge", k)] = f"e{i}"
        lines.append(f'  <key id="e{i}" for="edge" attr.name={quoteattr(k)} attr.type="{t}"/>')
    kind = "directed" if graph.directed else "undirected"
    lines.append(f'  <graph id="G" edgedefault="{kind}">')
    for nd in graph.nodes():
        attrs = graph.node_attrs(nd.label)
        if not attrs:
            lines.append(f"    <node id={quoteattr(nd.label)}/>")
            continue
        lines.append(f"    <node id={quoteattr(nd.label)}>")
        for k in sorted(attrs):
            lines.append(f'      <data key="{ids[("node", k)]}">{escape(_graphml_value(attrs[k]))}</data>')
        lines.append("    </node>")
    for e in graph.edges():
        lines.append(f"    <edge source={quoteattr(e.source.label)} target={quoteattr(e.target.label)}>")
        lines.append(f'      <data key="{ids[("edge", "weight")]}">{_graphml_value(float(e.weight))}</data>')
        for k in sorted(e.attrs):
            if k != "weight":
                lines.append(f'      <data key="{ids[("edge", k)]}">{escape(_graphml_value(e.attrs[k]))}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def export_graphml(graph: Graph, path) -> Path:
    path = Path(path)
    path.write_text(graphml_string(graph), encoding="utf-8")
    return path


_PARSERS = {
    "boolean": lambda s: s.strip().lower() == "true",
    "int": int, "long": int,
    "float": float, "double": float,
    "string": str,
}


def load_graphml(path) -> Graph:
    """Read GraphML written by ``export_graphml`` (or any single-graph file)."""
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise FormatError(f"invalid GraphML: {exc}", path=path) from exc
    ns = {"g": GRAPHML_NS}
    keys = {}
    for key in root.findall("g:key", ns):
        keys[key.get("id")] = (key.get("attr.name"), _PARSERS.get(key.get("attr.type", "string"), str))
    gel = root.find("g:graph", ns)
    if gel is None:
        raise FormatError("GraphML without a graph element", path=path)
    g = Graph(directed=gel.get("edgedefault") == "directed")

    def data(el):
        out = {}
        for d in el.findall("g:data", ns):
            name, parse = keys.get(d.get("key"), (d.get("key"), str))
            out[name] = parse(d.text or "")
        return out

    for nel in gel.findall("g:node", ns):
        g.add_node(nel.get("id"), data(nel))
    for eel in gel.findall("g:edge", ns):
        attrs = data(eel)
        weight = attrs.pop("weight", 1.0)
        g.add_edge(eel.get("source"), eel.get("target"), weight, attrs)
    return g


# -- DOT -----------------------------------------------------------------


def _dot_id(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot_string(graph: Graph, spec: RenderSpec | None = None) -> str:
    spec = spec or RenderSpec()
    kind = "digraph" if graph.directed else "graph"
    if graph.n == 0:
        return f"{kind} {{}}\n"
    arrow = "->" if graph.directed else "--"
    lines = [f"{kind} {{"]
    for nd in graph.nodes():
        pos = graph.position(nd.label)
        extra = f' [pos="{pos[0]!r},{pos[1]!r}"]' if pos else ""
        lines.append(f"  {_dot_id(nd.label)}{extra};")
    for e in graph.edges():
        w = float(e.weight)
        lines.append(f"  {_dot_id(e.source.label)} {arrow} {_dot_id(e.target.label)} "
                     f"[weight={w!r}, penwidth={spec.edge_width(w)!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(graph: Graph, path, spec: RenderSpec | None = None) -> Path:
    path = Path(path)
    path.write_text(dot_string(graph, spec), encoding="utf-8")
    return path


# -- SVG -----------------------------------------------------------------


def _fmt(v: float) -> str:
    return repr(round(float(v), 6))


def _time_color(t: int) -> str:
    return TIME_COLORS[min(max(t, 0), len(TIME_COLORS) - 1)]


def svg_string(graph: Graph, spec: RenderSpec | None = None, trace: dict | None = None,
               t: int | None = None) -> str:
    """Render positioned nodes and weighted edges as an SVG 1.1 document.

    With a trace, nodes activated by time ``t`` (default: the latest time in
    the trace) are colored by activation-time bucket, the rest grey.
    """
    spec = spec or RenderSpec()
    missing = [lab for lab in graph.labels if graph.position(lab) is None]
    if missing:
        raise ValidationError("cannot render unpositioned nodes: " + ", ".join(missing))
    if trace is not None and t is None:
        t = max(trace.values(), default=0)

    inner_w = spec.width - 2 * spec.margin
    inner_h = spec.height - 2 * spec.margin

    def to_px(label):
        x, y = graph.position(label)
        return spec.margin + x * inner_w, spec.margin + (1.0 - y) * inner_h

    if spec.node_size_mode == "weighted_in_degree":
        win = {nd.label: graph.degree(nd, "in", weighted=True) for nd in graph.nodes()}
        top = max(win.values(), default=0.0)

        def radius(label):
            if top <= 0:
                return spec.min_node_radius
            return max(spec.min_node_radius, spec.max_node_radius * win[label] / top)
    else:
        def radius(label):
            return spec.node_radius

    def color(label):
        if trace is not None:
            at = trace.get(label)
            return _time_color(at) if at is not None and at <= t else INACTIVE_COLOR
        if spec.color_source:
            return str(graph.node_attrs(label).get(spec.color_source, DEFAULT_COLOR))
        return DEFAULT_COLOR

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width}" '
           f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">']
    if graph.directed:
        out.append('  <defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" '
                   'markerWidth="6" markerHeight="6" orient="auto">'
                   '<path d="M0,0 L10,5 L0,10 z" fill="#888888"/></marker></defs>')
    if trace is not None:
        out.append(f"  <title>t={t}</title>")
    out.append('  <g class="edges" stroke="#888888" stroke-opacity="0.7">')
    for e in graph.edges():
        x1, y1 = to_px(e.source.label)
        x2, y2 = to_px(e.target.label)
        width = spec.edge_width(float(e.weight))
        style = spec.edge_style(width)
        attrs = [f'x1="{_fmt(x1)}"', f'y1="{_fmt(y1)}"', f'x2="{_fmt(x2)}"', f'y2="{_fmt(y2)}"',
                 f'stroke-width="{width!r}"']
        if DASHES[style]:
            attrs.append(f'stroke-dasharray="{DASHES[style]}"')
        if graph.directed:
            attrs.append('marker-end="url(#arrow)"')
        if spec.color_source and trace is None:
            attrs.append(f"stroke={quoteattr(color(e.source.label))}")
        out.append(f"    <line {' '.join(attrs)}/>")
    out.append("  </g>")
    out.append('  <g class="nodes" stroke="#ffffff" stroke-width="1">')
    for nd in graph.nodes():
        x, y = to_px(nd.label)
        r = radius(nd.label)
        out.append(f'    <circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" '
                   f'fill={quoteattr(color(nd.label))}><title>{escape(nd.label)}</title></circle>')
    out.append("  </g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(graph: Graph, spec: RenderSpec | None, path, trace: dict | None = None,
               t: int | None = None) -> Path:
    path = Path(path)
    path.write_text(svg_string(graph, spec, trace, t), encoding="utf-8")
    return path


def render_frames(graph: Graph, spec: RenderSpec | None, trace: dict, times, out_dir,
                  stem: str = "frame") -> list[Path]:
    """One SVG per requested time step, named ``<stem>_t<k>.svg``."""
    docs = [(t, svg_string(graph, spec, trace, t)) for t in times]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for t, doc in docs:
        p = out_dir / f"{stem}_t{t}.svg"
        p.write_text(doc, encoding="utf-8")
        paths.append(p)
    return paths


def edge_widths_from_svg(text: str) -> list[float]:
    """Stroke widths of every edge line, in document order (used by tests and checks)."""
    root = ET.fromstring(text)
    return [float(el.get("stroke-width")) for el in root.iter("{http://www.w3.org/2000/svg}line")]

