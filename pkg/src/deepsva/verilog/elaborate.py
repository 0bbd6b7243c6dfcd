"""Elaboration: instance-tree expansion, parameter folding, name resolution."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping, Optional

from ..diagnostics import Diagnostic, DiagnosticError, Loc, error, info, warning
from . import ast as A


class ElabError(DiagnosticError):
    pass


class ConstError(Exception):
    pass


def eval_const(e: A.Expr, env: Mapping[str, int]) -> int:
    """Fold an expression over integer parameters; raises ConstError otherwise."""
    if isinstance(e, A.Number):
        if e.value is None:
            raise ConstError("x/z digits in constant")
        return e.value
    if isinstance(e, A.Ident):
        if e.name not in env:
            raise ConstError(f"'{e.name}' is not a parameter")
        return env[e.name]
    if isinstance(e, A.Unary):
        v = eval_const(e.operand, env)
        if e.op == "-":
            return -v
        if e.op == "+":
            return v
        if e.op == "!":
            return int(not v)
        if e.op == "~":
            return ~v
        raise ConstError(f"reduction operator '{e.op}' in constant")
    if isinstance(e, A.Binary):
        a = eval_const(e.left, env)
        b = eval_const(e.right, env)
        op = e.op
        try:
            return {
                "+": lambda: a + b,
                "-": lambda: a - b,
                "*": lambda: a * b,
                "/": lambda: a // b,
                "%": lambda: a % b,
                "**": lambda: a ** b,
                "<<": lambda: a << b,
                ">>": lambda: a >> b,
                "<<<": lambda: a << b,
                ">>>": lambda: a >> b,
                "&": lambda: a & b,
                "|": lambda: a | b,
                "^": lambda: a ^ b,
                "==": lambda: int(a == b),
                "!=": lambda: int(a != b),
                "<": lambda: int(a < b),
                "<=": lambda: int(a <= b),
                ">": lambda: int(a > b),
                ">=": lambda: int(a >= b),
                "&&": lambda: int(bool(a) and bool(b)),
                "||": lambda: int(bool(a) or bool(b)),
            }[op]()
        except KeyError:
            raise ConstError(f"operator '{op}' in constant") from None
        except (ZeroDivisionError, ValueError) as exc:
            raise ConstError(str(exc)) from None
    if isinstance(e, A.Ternary):
        return eval_const(e.if_true if eval_const(e.cond, env) else e.if_false, env)
    raise ConstError(f"{type(e).__name__} in constant")


@dataclass(frozen=True)
class SignalInfo:
    name: str
    kind: str  # input | output | inout | wire | reg | integer
    msb: int
    lsb: int

    @property
    def width(self) -> int:
        return abs(self.msb - self.lsb) + 1

    @property
    def is_port(self) -> bool:
        return self.kind in ("input", "output", "inout")


@dataclass(frozen=True)
class InstanceNode:
    path: str
    name: str
    module: str
    blackbox: bool = False
    params: Mapping[str, int] = field(default_factory=dict)
    # named form, child port order; actual is None for an unconnected port
    connections: tuple = ()
    signals: Mapping[str, SignalInfo] = field(default_factory=dict)
    children: tuple = ()
    loc: Loc = field(default=Loc(), compare=False)

    @property
    def parent_path(self) -> Optional[str]:
        return self.path.rsplit(".", 1)[0] if "." in self.path else None


@dataclass(frozen=True)
class DesignDB:
    modules: Mapping[str, A.ModuleDecl]
    top: str
    root: InstanceNode
    blackboxes: frozenset
    implicit_nets: Mapping[str, tuple] = field(default_factory=dict)
    diagnostics: tuple = ()

    def instances(self) -> Iterator[InstanceNode]:
        """All instance-tree nodes, pre-order, children in declaration order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def instance(self, path: str) -> Optional[InstanceNode]:
        for node in self.instances():
            if node.path == path:
                return node
        return None

    def instances_of(self, module: str) -> list[InstanceNode]:
        return [n for n in self.instances() if n.module == module]

    @property
    def reachable_modules(self) -> list[str]:
        """Defined modules present in the instance tree, sorted by name."""
        return sorted({n.module for n in self.instances() if not n.blackbox})

    def ports(self, module: str) -> tuple:
        return self.modules[module].ports

    def is_port(self, module: str, signal: str) -> bool:
        mod = self.modules.get(module)
        return mod is not None and mod.port(signal) is not None


def select_top(unit: A.SourceUnit) -> tuple[str, Diagnostic]:
    """The unique module that no other module instantiates."""
    instantiated = {inst.module for m in unit.modules for inst in m.instances if inst.module != m.name}
    candidates = sorted(m.name for m in unit.modules if m.name not in instantiated)
    if len(candidates) == 1:
        return candidates[0], info(f"top module '{candidates[0]}' selected automatically")
    if not candidates:
        cycle = _find_cycle(unit)
        if cycle:
            raise ElabError("recursive instantiation: " + " -> ".join(cycle))
        raise ElabError("no top-module candidate: every module is instantiated")
    raise ElabError("ambiguous top module; candidates: " + ", ".join(candidates) + " (use --top)")


def _find_cycle(unit: A.SourceUnit) -> Optional[list[str]]:
    graph = {m.name: sorted({i.module for i in m.instances}) for m in unit.modules}
    state: dict[str, int] = {}

    def visit(name: str, stack: list[str]) -> Optional[list[str]]:
        state[name] = 1
        stack.append(name)
        for child in graph.get(name, ()):
            if state.get(child) == 1:
                return stack[stack.index(child):] + [child]
            if child in graph and child not in state:
                found = visit(child, stack)
                if found:
                    return found
        stack.pop()
        state[name] = 2
        return None

    for name in sorted(graph):
        if name not in state:
            found = visit(name, [])
            if found:
                return found
    return None


class _Elaborator:
    def __init__(self, unit: A.SourceUnit):
        self.unit = unit
        self.modules = {m.name: m for m in unit.modules}
        self.diags: list[Diagnostic] = list(unit.diagnostics)
        self.blackboxes: set[str] = set()
        self.implicit: dict[str, tuple] = {}
        self.checked: set[str] = set()

    def run(self, top: Optional[str]) -> DesignDB:
        if top is None:
            top, note = select_top(self.unit)
            self.diags.append(note)
        elif top not in self.modules:
            raise ElabError(f"unknown top module '{top}'")
        root = self.expand(top, top, top, {}, [], None, ())
        return DesignDB(
            modules=MappingProxyType(dict(self.modules)),
            top=top,
            root=root,
            blackboxes=frozenset(self.blackboxes),
            implicit_nets=MappingProxyType(dict(self.implicit)),
            diagnostics=tuple(self.diags),
        )

    def expand(self, module: str, name: str, path: str, overrides: dict, stack: list,
               loc: Optional[Loc], connections: tuple) -> InstanceNode:
        mod = self.modules[module]
        self.check_names(mod)
        env: dict[str, int] = {}
        for p in mod.params:
            if not p.local and p.name in overrides:
                env[p.name] = overrides[p.name]
                continue
            try:
                env[p.name] = eval_const(p.value, env)
            except ConstError as exc:
                raise ElabError(f"parameter '{p.name}' of module '{module}' is not constant: {exc}", p.loc)

        signals: dict[str, SignalInfo] = {}
        for p in mod.ports:
            signals[p.name] = self.signal(p.name, p.direction, p.range, env, module, p.loc)
        for n in mod.nets:
            signals[n.name] = self.signal(n.name, n.kind, n.range, env, module, n.loc)
        for implicit in self.implicit.get(module, ()):
            signals[implicit] = SignalInfo(implicit, "wire", 0, 0)

        children = []
        seen: dict[str, A.InstanceDecl] = {}
        stack = stack + [module]
        for inst in mod.instances:
            if inst.name in seen or inst.name in signals:
                raise ElabError(f"duplicate instance name '{inst.name}' in module '{module}'", inst.loc)
            seen[inst.name] = inst
            child_path = f"{path}.{inst.name}"
            if inst.module in stack:
                cycle = stack[stack.index(inst.module):] + [inst.module]
                raise ElabError("recursive instantiation: " + " -> ".join(cycle), inst.loc)
            if inst.module not in self.modules:
                if inst.module not in self.blackboxes:
                    self.diags.append(warning(f"module '{inst.module}' is not defined; treated as blackbox", inst.loc))
                self.blackboxes.add(inst.module)
                conns = tuple(
                    (c.formal if c.formal is not None else f"#{i}", c.actual)
                    for i, c in enumerate(inst.connections)
                )
                children.append(InstanceNode(child_path, inst.name, inst.module, True,
                                             MappingProxyType({}), conns, MappingProxyType({}), (), inst.loc))
                continue
            child = self.modules[inst.module]
            child_overrides = self.param_overrides(inst, child, env)
            conns = self.bind_ports(inst, child)
            children.append(self.expand(inst.module, inst.name, child_path, child_overrides,
                                        stack, inst.loc, conns))

        return InstanceNode(path, name, module, False, MappingProxyType(env), connections,
                            MappingProxyType(signals), tuple(children), loc or mod.loc)

    def signal(self, name, kind, rng, env, module, loc) -> SignalInfo:
        if rng is None:
            return SignalInfo(name, kind, 0, 0)
        try:
            msb = eval_const(rng.msb, env)
            lsb = eval_const(rng.lsb, env)
        except ConstError as exc:
            raise ElabError(f"range of '{name}' in module '{module}' is not constant: {exc}", loc)
        if msb < 0 or lsb < 0:
            raise ElabError(f"negative bit index in range of '{name}' in module '{module}'", loc)
        return SignalInfo(name, kind, msb, lsb)

    def param_overrides(self, inst: A.InstanceDecl, child: A.ModuleDecl, env) -> dict[str, int]:
        out: dict[str, int] = {}
        public = [p for p in child.params if not p.local]
        positional = [c for c in inst.params if c.formal is None]
        if len(positional) > len(public):
            raise ElabError(f"too many parameter overrides for module '{child.name}'", inst.loc)
        for c, p in zip(positional, public):
            out[p.name] = self.fold_override(c, p.name, env, inst)
        for c in inst.params:
            if c.formal is None:
                continue
            target = child.param(c.formal)
            if target is None or target.local:
                raise ElabError(f"module '{child.name}' has no overridable parameter '{c.formal}'", c.loc)
            out[c.formal] = self.fold_override(c, c.formal, env, inst)
        return out

    def fold_override(self, c: A.Connection, pname: str, env, inst) -> int:
        if c.actual is None:
            raise ElabError(f"empty override for parameter '{pname}'", c.loc)
        try:
            return eval_const(c.actual, env)
        except ConstError as exc:
            raise ElabError(f"override of parameter '{pname}' in instance '{inst.name}' is not constant: {exc}", c.loc)

    def bind_ports(self, inst: A.InstanceDecl, child: A.ModuleDecl) -> tuple:
        if inst.positional:
            if len(inst.connections) != len(child.ports):
                raise ElabError(
                    f"port-count mismatch in instance '{inst.name}' of '{child.name}': "
                    f"{len(inst.connections)} connections for {len(child.ports)} ports",
                    inst.loc,
                )
            return tuple((p.name, c.actual) for p, c in zip(child.ports, inst.connections))
        bound: dict[str, Optional[A.Expr]] = {}
        for c in inst.connections:
            if child.port(c.formal) is None:
                raise ElabError(f"module '{child.name}' has no port '{c.formal}' (instance '{inst.name}')", c.loc)
            if c.formal in bound:
                raise ElabError(f"port '{c.formal}' connected twice in instance '{inst.name}'", c.loc)
            bound[c.formal] = c.actual
        return tuple((p.name, bound.get(p.name)) for p in child.ports)

    def check_names(self, mod: A.ModuleDecl) -> None:
        """Report identifiers that name no port, net or parameter of ``mod``."""
        if mod.name in self.checked:
            return
        self.checked.add(mod.name)
        signals = {p.name for p in mod.ports} | {n.name for n in mod.nets}
        params = {p.name for p in mod.params}
        declared = signals | params
        implicit: list[str] = []

        def check(e: Optional[A.Expr], *, lvalue: bool = False) -> None:
            if e is None:
                return
            for ident in A.idents(e):
                if ident.name not in declared and ident.name not in implicit:
                    self.diags.append(error(f"undeclared identifier '{ident.name}' in module '{mod.name}'", ident.loc))
            if lvalue:
                for target, _ in A.lvalue_targets(e):
                    if target.name in params:
                        self.diags.append(error(f"assignment to parameter '{target.name}'", target.loc))

        def check_stmt(s: A.Stmt) -> None:
            if isinstance(s, A.Assign):
                check(s.lhs, lvalue=True)
                check(s.rhs)
            elif isinstance(s, A.Block):
                for inner in s.stmts:
                    check_stmt(inner)
            elif isinstance(s, A.If):
                check(s.cond)
                check_stmt(s.then)
                if s.otherwise is not None:
                    check_stmt(s.otherwise)
            elif isinstance(s, A.Case):
                check(s.subject)
                for item in s.items:
                    for label in item.labels:
                        check(label)
                    check_stmt(item.body)

        # implicit nets first: an undeclared bare identifier in a port connection
        for inst in mod.instances:
            for c in inst.connections:
                if isinstance(c.actual, A.Ident) and c.actual.name not in declared and c.actual.name not in implicit:
                    implicit.append(c.actual.name)
                    self.diags.append(warning(f"implicit net '{c.actual.name}' in module '{mod.name}'", c.actual.loc))
        if implicit:
            self.implicit[mod.name] = tuple(implicit)

        for p in mod.ports:
            if p.range is not None:
                check(p.range.msb)
                check(p.range.lsb)
        for item in mod.items:
            if isinstance(item, A.ContinuousAssign):
                check(item.lhs, lvalue=True)
                check(item.rhs)
            elif isinstance(item, A.Always):
                for ev in item.events:
                    check(ev.signal)
                check_stmt(item.body)
            elif isinstance(item, A.InstanceDecl):
                for c in item.params:
                    check(c.actual)
                for c in item.connections:
                    check(c.actual)
            # initial blocks are ignored


def elaborate(unit: A.SourceUnit, top: Optional[str] = None) -> DesignDB:
    """Expand ``unit`` from ``top`` into an immutable DesignDB.

    When ``top`` is None the unique never-instantiated module is used.
    Undefined modules become blackboxes with a warning; structural errors
    (recursion, bad connections, non-constant ranges) raise ElabError.
    """
    return _Elaborator(unit).run(top)
