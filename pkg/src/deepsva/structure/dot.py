"""Graphviz DOT rendering for call graphs and dataflow graphs."""

from __future__ import annotations

from .dataflow import DataflowGraph
from .mcg import ModuleCallGraph


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _mcg_dot(g: ModuleCallGraph) -> str:
    lines = ["digraph mcg {", "  rankdir=TB;", "  node [shape=box];"]
    for name, external in g.nodes:
        attrs = " [style=dashed, external=true]" if external else ""
        lines.append(f"  {_q(name)}{attrs};")
    for e in g.edges:
        lines.append(f"  {_q(e.parent)} -> {_q(e.child)} [label={_q(e.instance)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


_STYLE = {
    "continuous": "solid",
    "blocking": "solid",
    "nonblocking": "bold",
    "port": "dotted",
    "control": "dashed",
}


def _dataflow_dot(g: DataflowGraph) -> str:
    lines = ["digraph dataflow {", "  rankdir=LR;", "  node [shape=ellipse];"]
    for n in g.nodes:
        attrs = " [shape=box]" if n in g.ports else ""
        lines.append(f"  {_q(n)}{attrs};")
    for e in g.edges:
        lines.append(f"  {_q(e.source)} -> {_q(e.sink)} [kind={e.kind}, style={_STYLE[e.kind]}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(graph: ModuleCallGraph | DataflowGraph) -> str:
    if isinstance(graph, ModuleCallGraph):
        return _mcg_dot(graph)
    if isinstance(graph, DataflowGraph):
        return _dataflow_dot(graph)
    raise TypeError(f"cannot render {type(graph).__name__} as DOT")
