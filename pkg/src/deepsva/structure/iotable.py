"""Per-module I/O tables: port rows with their cross-instance connections."""

from __future__ import annotations

from dataclasses import dataclass

from .. import SCHEMA_VERSION
from ..diagnostics import Diagnostic, info, warning
from ..verilog.elaborate import DesignDB
from .signals import ref, signal_reads, signal_writes

PRIMARY = "primary"


@dataclass(frozen=True)
class IoRow:
    name: str
    direction: str
    width: int
    connections: tuple  # of "instance.path.signal" strings, or ("primary",) for top ports


@dataclass(frozen=True)
class IoTable:
    module: str
    rows: tuple

    def row(self, name: str) -> IoRow | None:
        for r in self.rows:
            if r.name == name:
                return r
        return None

    @property
    def port_names(self) -> list[str]:
        return [r.name for r in self.rows]

    def to_json(self) -> dict:
        return {
            "module": self.module,
            "rows": [
                {"name": r.name, "direction": r.direction, "width": r.width, "connections": list(r.connections)}
                for r in self.rows
            ],
        }

    def render(self) -> str:
        """Plain-text table used inside LLM prompts."""
        lines = ["| port | direction | width | connections |", "|---|---|---|---|"]
        for r in self.rows:
            conns = ", ".join(r.connections) if r.connections else "(unconnected)"
            lines.append(f"| {r.name} | {r.direction} | {r.width} | {conns} |")
        return "\n".join(lines)


def build_io_tables(db: DesignDB) -> tuple[dict[str, IoTable], list[Diagnostic]]:
    """One IoTable per reachable module, keyed and ordered by module name."""
    diags: list[Diagnostic] = []
    nodes_by_path = {n.path: n for n in db.instances()}
    tables: dict[str, IoTable] = {}
    for module in db.reachable_modules:
        decl = db.modules[module]
        instances = db.instances_of(module)
        first = instances[0]
        conns: dict[str, list[str]] = {p.name: [] for p in decl.ports}
        for node in instances:
            if node.path == db.root.path:
                for p in decl.ports:
                    conns[p.name].append(PRIMARY)
                continue
            parent = nodes_by_path[node.parent_path]
            for formal, actual in node.connections:
                port = decl.port(formal)
                if actual is None:
                    diags.append(warning(f"unconnected port '{formal}' of instance '{node.path}'", node.loc))
                    continue
                if port.direction == "output":
                    names = [n for n, _ in signal_writes(actual)]
                else:
                    names = [n for n, _ in signal_reads(actual)]
                names = [n for n in dict.fromkeys(names) if n in parent.signals]
                if not names:
                    diags.append(info(f"port '{formal}' of instance '{node.path}' is tied to a constant", node.loc))
                conns[formal].extend(ref(parent.path, n) for n in names)
            widths = {p.name: node.signals[p.name].width for p in decl.ports}
            first_widths = {p.name: first.signals[p.name].width for p in decl.ports}
            if widths != first_widths:
                diags.append(info(f"instances of '{module}' differ in port widths; table uses '{first.path}'", node.loc))
        rows = tuple(
            IoRow(p.name, p.direction, first.signals[p.name].width, tuple(dict.fromkeys(conns[p.name])))
            for p in decl.ports
        )
        tables[module] = IoTable(module, rows)
    return tables, diags


def io_tables_to_json(tables: dict[str, IoTable]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "io_tables",
        "modules": [tables[name].to_json() for name in sorted(tables)],
    }
