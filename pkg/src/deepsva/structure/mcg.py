"""Module call graph: modules as nodes, one edge per instantiation."""

from __future__ import annotations

from dataclasses import dataclass

from .. import SCHEMA_VERSION
from ..verilog.elaborate import DesignDB


@dataclass(frozen=True)
class MCGEdge:
    parent: str
    child: str
    instance: str


@dataclass(frozen=True)
class ModuleCallGraph:
    top: str
    nodes: tuple  # of (name, external) pairs, sorted
    edges: tuple  # of MCGEdge, sorted

    @property
    def node_names(self) -> list[str]:
        return [name for name, _ in self.nodes]

    def is_external(self, name: str) -> bool:
        return dict(self.nodes).get(name, False)

    def parents(self, module: str) -> list[str]:
        return sorted({e.parent for e in self.edges if e.child == module})

    def children(self, module: str) -> list[MCGEdge]:
        return [e for e in self.edges if e.parent == module]

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "module_call_graph",
            "top": self.top,
            "nodes": [{"name": n, "external": ext} for n, ext in self.nodes],
            "edges": [{"parent": e.parent, "child": e.child, "instance": e.instance} for e in self.edges],
        }


def build_mcg(db: DesignDB) -> ModuleCallGraph:
    modules = db.reachable_modules
    nodes = {name: False for name in modules}
    nodes.update({name: True for name in db.blackboxes})
    edges = []
    for name in modules:
        for inst in db.modules[name].instances:
            edges.append(MCGEdge(name, inst.module, inst.name))
    edges.sort(key=lambda e: (e.parent, e.child, e.instance))
    return ModuleCallGraph(db.top, tuple(sorted(nodes.items())), tuple(edges))
