"""Graphviz DOT export."""

from __future__ import annotations


def _quote(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(vertices, edges, label=str, highlight=(), name="G", node_attrs=None) -> str:
    """Undirected DOT text; edges in ``highlight`` are drawn red and bold."""
    marked = {frozenset(e) for e in highlight}
    node_attrs = node_attrs or {}
    lines = [f"graph {_quote(name)} {{"]
    for v in vertices:
        attrs = node_attrs.get(v, "")
        lines.append(f"  {_quote(label(v))}{' [' + attrs + ']' if attrs else ''};")
    for u, v in edges:
        style = ' [color="red", penwidth=2]' if frozenset((u, v)) in marked else ""
        lines.append(f"  {_quote(label(u))} -- {_quote(label(v))}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def path_edges(path) -> list:
    return list(zip(path, path[1:]))


def complex_to_dot(pc, highlight_path=None) -> str:
    hl = path_edges(highlight_path) if highlight_path else ()
    return graph_to_dot(pc.apices, pc.edges, pc.label, hl, name="projection_complex")


def skeleton_to_dot(skeleton, label=str, name="skeleton") -> str:
    """Translates are boxes named ``T<i>``; intersection points are ellipses."""

    def lab(node):
        return f"T{node[1]}" if node[0] == "T" else label(node[1])

    attrs = {n: "shape=box" for n in skeleton.nodes() if n[0] == "T"}
    return graph_to_dot(skeleton.nodes(), skeleton.edges, lab, name=name, node_attrs=attrs)
