"""DOT and SVG drawings of a design on its instance."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .errors import TreeError
from .graph import Instance
from .metrics import CdReport, cd_tree
from .tree import RootedTree

OBSTACLE_FILL = "#b3b3b3"
NODE_FILL = "#e2e2e2"
TREE_STROKE = "#202020"
START_FILL = "#1f77b4"
TARGET_FILL = "#d62728"
LDP_STROKE = "#ff9f1c"


def _check_refs(tree: RootedTree, inst: Instance) -> None:
    g = inst.graph
    bad = sorted(u for u in tree.nodes() if u not in g)
    if bad:
        raise TreeError(f"tree references nodes not in the instance: {bad[:10]}")


def render_dot(tree: RootedTree, inst: Instance) -> str:
    """Graphviz digraph of the tree; ``pos`` attributes hold node coordinates."""
    _check_refs(tree, inst)
    g = inst.graph
    tset = set(inst.targets)
    lines = ["digraph design {", "  node [shape=circle, width=0.08, label=\"\"];"]
    for u in sorted(tree.nodes()):
        x, y = g.position(u)
        attrs = [f'pos="{x:g},{y:g}!"']
        if u == tree.root:
            attrs.append('shape=box, style=filled, fillcolor="' + START_FILL + '"')
        elif u in tset:
            attrs.append('shape=diamond, style=filled, fillcolor="' + TARGET_FILL + '"')
        lines.append(f"  {u} [{', '.join(attrs)}];")
    for p, v in tree.edges():
        lines.append(f"  {p} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_svg(
    tree: RootedTree,
    inst: Instance,
    report: CdReport | None = None,
    *,
    width: int = 800,
    show_grid: bool = True,
) -> str:
    """SVG picture: obstacles, base nodes, tree edges, start, targets, LDPs.

    Every element carries a class (``obstacle``, ``node``, ``tree-edge``,
    ``start``, ``target``, ``ldp``) so the output is easy to inspect.
    """
    _check_refs(tree, inst)
    g = inst.graph
    if report is None:
        report = cd_tree(tree, inst.targets)
    pts = [g.position(u) for u in g.nodes()]
    for r in inst.obstacles:
        pts.extend(r.vertices)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-9)
    margin = 20.0
    scale = (width - 2 * margin) / span
    height = int(round((y1 - y0) * scale + 2 * margin))
    step = scale * min((w for _, _, w in g.edges() if w > 0), default=span)
    rad = max(0.6, min(6.0, step * 0.18))

    def sx(x: float) -> float:
        return margin + (x - x0) * scale

    def sy(y: float) -> float:
        return height - margin - (y - y0) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(f'CD {report.cd:g}, weight {report.weight:g}')}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for r in inst.obstacles:
        poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in r.vertices)
        out.append(f'<polygon class="obstacle" points="{poly}" fill="{OBSTACLE_FILL}"/>')
    if show_grid:
        out.append(f'<g fill="{NODE_FILL}">')
        for u in g.nodes():
            x, y = g.position(u)
            out.append(f'<circle class="node" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="{rad * 0.6:.2f}"/>')
        out.append("</g>")
    out.append(f'<g stroke="{TREE_STROKE}" stroke-width="{max(1.0, rad * 0.7):.2f}" '
               'stroke-linecap="round">')
    for p, v in tree.edges():
        (ax, ay), (bx, by) = g.position(p), g.position(v)
        out.append(f'<line class="tree-edge" x1="{sx(ax):.2f}" y1="{sy(ay):.2f}" '
                   f'x2="{sx(bx):.2f}" y2="{sy(by):.2f}"/>')
    out.append("</g>")

    ldps = sorted({rec.ldp for rec in report.targets})
    for u in ldps:
        x, y = g.position(u)
        out.append(f'<circle class="ldp" data-node="{u}" cx="{sx(x):.2f}" cy="{sy(y):.2f}" '
                   f'r="{rad * 2.2:.2f}" fill="none" stroke="{LDP_STROKE}" '
                   f'stroke-width="{max(1.0, rad * 0.6):.2f}"/>')
    sxr, syr = g.position(tree.root)
    s = rad * 1.8
    out.append(f'<rect class="start" data-node="{tree.root}" x="{sx(sxr) - s:.2f}" '
               f'y="{sy(syr) - s:.2f}" width="{2 * s:.2f}" height="{2 * s:.2f}" fill="{START_FILL}"/>')
    for t in inst.targets:
        x, y = g.position(t)
        cx, cy = sx(x), sy(y)
        d = rad * 2.0
        pts_s = f"{cx:.2f},{cy - d:.2f} {cx + d:.2f},{cy:.2f} {cx:.2f},{cy + d:.2f} {cx - d:.2f},{cy:.2f}"
        out.append(f'<polygon class="target" data-node="{t}" points="{pts_s}" fill="{TARGET_FILL}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
