"""Resolution of ``module.signal`` references against the elaborated design."""

from __future__ import annotations

from dataclasses import replace
from typing import Mapping, Optional

from ..diagnostics import Diagnostic, warning
from ..structure.iotable import IoTable
from ..verilog.elaborate import DesignDB
from .assertion import RESOLVED, SYNTAX_OK, DeepAssertion
from .grammar import SigRef, sigrefs


class Resolver:
    """Maps the first component of a reference to one instance of a defined module.

    Order: a module name with exactly one instance, then a unique instance
    whose path ends in that name; anything else is unknown or ambiguous.
    """

    def __init__(self, db: DesignDB, tables: Mapping[str, IoTable]):
        self.db = db
        self.tables = tables
        self.nodes = list(db.instances())

    def locate(self, name: str) -> tuple[Optional[str], Optional[str], Optional[str]]:
        """(module, instance path, problem) for a reference prefix."""
        by_module = [n for n in self.nodes if n.module == name and not n.blackbox]
        if len(by_module) == 1:
            return name, by_module[0].path, None
        by_suffix = [n for n in self.nodes if n.name == name or n.path.endswith("." + name)]
        if by_module or len(by_suffix) > 1:
            paths = sorted({n.path for n in by_module + by_suffix})
            return None, None, f"ambiguous instance '{name}'; use one of: {', '.join(paths)}"
        if by_suffix:
            node = by_suffix[0]
            if node.blackbox:
                return None, None, f"'{name}' is an instance of blackbox module '{node.module}'"
            return node.module, node.path, None
        if name in self.db.blackboxes:
            return None, None, f"'{name}' is a blackbox module with no port information"
        return None, None, f"unknown module '{name}'"

    def signal(self, r: SigRef) -> tuple[Optional[str], Optional[str]]:
        """(instance path, problem) for one reference."""
        module, path, problem = self.locate(r.module)
        if problem:
            return None, problem
        table = self.tables.get(module)
        row = table.row(r.signal) if table is not None else None
        if row is None:
            kind = "non-port signal" if r.signal in self._signals(path) else "unknown signal"
            return None, f"{kind} '{r.module}.{r.signal}': {module} has no port '{r.signal}'"
        top = r.msb if r.lsb is None else max(r.msb, r.lsb)
        if top is not None and top >= row.width:
            return None, f"select [{top}] out of range for {r.module}.{r.signal} (width {row.width})"
        return path, None

    def _signals(self, path: str):
        for n in self.nodes:
            if n.path == path:
                return n.signals
        return {}

    def clock_ok(self, a: DeepAssertion) -> Optional[str]:
        clock = a.tree.clock
        if clock.module is not None:
            _, problem = self.signal(SigRef(clock.module, clock.name))
            return problem
        candidates = [self.db.top]
        if a.module and a.module in self.tables:
            candidates.append(a.module)
        for module in candidates:
            row = self.tables[module].row(clock.name) if module in self.tables else None
            if row is not None and row.direction == "input":
                return None
        return f"unknown clock '{clock.name}': not an input port of {' or '.join(candidates)}"


def resolve_signals(a: DeepAssertion, db: DesignDB, tables: Mapping[str, IoTable],
                    resolver: Optional[Resolver] = None) -> DeepAssertion:
    if a.status != SYNTAX_OK:
        return a
    r = resolver or Resolver(db, tables)
    diags: list[Diagnostic] = []
    paths: list[str] = []
    problem = r.clock_ok(a)
    if problem:
        diags.append(warning(problem, a.loc))
    for ref in list(sigrefs(a.tree.antecedent)) + list(sigrefs(a.tree.consequent)):
        path, problem = r.signal(ref)
        if problem:
            diags.append(warning(problem, a.loc))
        else:
            paths.append(f"{path}.{ref.signal}")
    if diags:
        return replace(a, diagnostics=a.diagnostics + tuple(dict.fromkeys(diags)))
    return replace(a, status=RESOLVED, instances=tuple(dict.fromkeys(paths)))
