"""Signal-level dataflow graph across the whole instance tree."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .. import SCHEMA_VERSION
from ..diagnostics import Diagnostic, Loc, info, warning
from ..verilog import ast as A
from ..verilog.elaborate import DesignDB, InstanceNode
from .signals import ref, signal_reads, signal_writes

EDGE_KINDS = ("continuous", "blocking", "nonblocking", "port", "control")


@dataclass(frozen=True)
class DataflowEdge:
    source: str
    sink: str
    kind: str
    loc: Loc = field(default=Loc(), compare=False)
    # extra facts; not part of identity
    source_select: Optional[str] = field(default=None, compare=False)
    sink_select: Optional[str] = field(default=None, compare=False)
    sequential: bool = field(default=False, compare=False)
    via: Optional[str] = field(default=None, compare=False)  # assignment kind behind a control edge
    direction: Optional[str] = field(default=None, compare=False)  # formal direction for port edges

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.source, self.sink, self.kind)

    def to_json(self) -> dict:
        out = {
            "source": self.source,
            "sink": self.sink,
            "kind": self.kind,
            "file": self.loc.file,
            "line": self.loc.line,
            "col": self.loc.col,
            "sequential": self.sequential,
        }
        for name in ("source_select", "sink_select", "via", "direction"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


@dataclass(frozen=True)
class DataflowGraph:
    nodes: tuple  # sorted signal refs
    edges: tuple  # sorted DataflowEdge
    ports: frozenset  # refs that are ports of their instance's module
    outputs: tuple  # refs of output ports (top and every instance), sorted
    diagnostics: tuple = ()

    def predecessors(self, node: str, include_control: bool = True) -> list[str]:
        preds = self._preds_all if include_control else self._preds_data
        return preds.get(node, [])

    def edges_between(self, source: str, sink: str) -> list[DataflowEdge]:
        return [e for e in self.edges if e.source == source and e.sink == sink]

    def has_edge(self, source: str, sink: str, include_control: bool = True) -> bool:
        return source in self.predecessors(sink, include_control)

    def __post_init__(self):
        all_p: dict[str, set] = {}
        data_p: dict[str, set] = {}
        for e in self.edges:
            all_p.setdefault(e.sink, set()).add(e.source)
            if e.kind != "control":
                data_p.setdefault(e.sink, set()).add(e.source)
        object.__setattr__(self, "_preds_all", {k: sorted(v) for k, v in all_p.items()})
        object.__setattr__(self, "_preds_data", {k: sorted(v) for k, v in data_p.items()})

    def to_networkx(self, include_control: bool = True) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.nodes)
        for e in self.edges:
            if include_control or e.kind != "control":
                g.add_edge(e.source, e.sink, kind=e.kind, sequential=e.sequential)
        return g

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "dataflow_graph",
            "nodes": [{"ref": n, "port": n in self.ports} for n in self.nodes],
            "edges": [e.to_json() for e in self.edges],
        }


class _Builder:
    def __init__(self, db: DesignDB):
        self.db = db
        self.edges: dict[tuple, DataflowEdge] = {}
        self.diags: list[Diagnostic] = []

    def add(self, edge: DataflowEdge) -> None:
        if edge.source == edge.sink and edge.kind == "continuous":
            self.diags.append(warning(f"combinational self-loop on '{edge.sink}'", edge.loc))
            return
        self.edges.setdefault(edge.key, edge)

    def instance(self, node: InstanceNode) -> None:
        decl = self.db.modules[node.module]
        sig = node.signals
        p = node.path
        for item in decl.items:
            if isinstance(item, A.ContinuousAssign):
                self.assign(node, item.lhs, item.rhs, "continuous", item.loc, [], False)
            elif isinstance(item, A.Always):
                self.stmt(node, item.body, [], item.clocked)
        for child in node.children:
            if child.blackbox:
                self.diags.append(info(f"no port edges for blackbox instance '{child.path}'", child.loc))
                continue
            cdecl = self.db.modules[child.module]
            for formal, actual in child.connections:
                if actual is None:
                    continue
                direction = cdecl.port(formal).direction
                inner = ref(child.path, formal)
                if direction in ("input", "inout"):
                    for name, sel in signal_reads(actual):
                        if name in sig:
                            self.add(DataflowEdge(ref(p, name), inner, "port", child.loc,
                                                  source_select=sel, direction=direction))
                if direction in ("output", "inout"):
                    writes = signal_writes(actual)
                    if not writes and direction == "output":
                        self.diags.append(warning(
                            f"output port '{formal}' of '{child.path}' connected to a non-lvalue expression",
                            child.loc))
                    for name, sel in writes:
                        if name in sig:
                            self.add(DataflowEdge(inner, ref(p, name), "port", child.loc,
                                                  sink_select=sel, direction=direction))

    def assign(self, node, lhs, rhs, kind, loc, conds, clocked) -> None:
        sig = node.signals
        p = node.path
        reads = [(n, s) for n, s in signal_reads(rhs) if n in sig]
        for idx in A.select_indices(lhs):
            reads.extend((n, s) for n, s in signal_reads(idx) if n in sig)
        sequential = kind == "nonblocking" or clocked
        for target, tsel in signal_writes(lhs):
            if target not in sig:
                continue
            for name, sel in reads:
                self.add(DataflowEdge(ref(p, name), ref(p, target), kind, loc,
                                      source_select=sel, sink_select=tsel, sequential=sequential))
            for name, sel, cloc in conds:
                self.add(DataflowEdge(ref(p, name), ref(p, target), "control", cloc,
                                      source_select=sel, sink_select=tsel, sequential=sequential, via=kind))

    def stmt(self, node, s: A.Stmt, conds: list, clocked: bool) -> None:
        sig = node.signals
        if isinstance(s, A.Assign):
            kind = "blocking" if s.blocking else "nonblocking"
            self.assign(node, s.lhs, s.rhs, kind, s.loc, conds, clocked)
        elif isinstance(s, A.Block):
            for inner in s.stmts:
                self.stmt(node, inner, conds, clocked)
        elif isinstance(s, A.If):
            extra = [(n, sel, s.loc) for n, sel in signal_reads(s.cond) if n in sig]
            self.stmt(node, s.then, conds + extra, clocked)
            if s.otherwise is not None:
                self.stmt(node, s.otherwise, conds + extra, clocked)
        elif isinstance(s, A.Case):
            subject = [(n, sel, s.loc) for n, sel in signal_reads(s.subject) if n in sig]
            for item in s.items:
                labels = [(n, sel, item.loc) for lab in item.labels for n, sel in signal_reads(lab) if n in sig]
                self.stmt(node, item.body, conds + subject + labels, clocked)


def build_dataflow(db: DesignDB) -> DataflowGraph:
    """Dataflow edges for every assignment, guarding condition and port binding.

    Dependencies are whole-signal; selects are kept as edge attributes.
    Signals that only appear in event controls contribute no edges.
    """
    b = _Builder(db)
    nodes: list[str] = []
    ports: set[str] = set()
    outputs: list[str] = []
    for node in db.instances():
        if node.blackbox:
            continue
        for name, info_ in node.signals.items():
            r = ref(node.path, name)
            nodes.append(r)
            if info_.is_port:
                ports.add(r)
                if info_.kind == "output":
                    outputs.append(r)
        b.instance(node)
    edges = tuple(sorted(b.edges.values(), key=lambda e: e.key))
    diags = b.diags + _loop_diagnostics(edges)
    return DataflowGraph(tuple(sorted(nodes)), edges, frozenset(ports), tuple(sorted(outputs)), tuple(diags))


def _loop_diagnostics(edges) -> list[Diagnostic]:
    """Report every strongly connected component built from combinational edges only."""
    g = nx.DiGraph()
    for e in edges:
        if e.sequential or (e.kind == "port" and e.direction == "inout"):
            continue
        if e.source == e.sink and e.kind == "blocking":
            # v = ...; v[7] = v[7] | x; reads the value just written, not a feedback path
            continue
        g.add_edge(e.source, e.sink)
    out = []
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1 or any(g.has_edge(n, n) for n in comp):
            members = sorted(comp)
            out.append(warning("combinational loop through " + ", ".join(members)))
    return sorted(out, key=lambda d: d.message)
