"""AST node types for the Verilog subset.

Every node carries a ``loc`` that is excluded from equality, so two trees
compare equal when they are structurally identical regardless of where
their text came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from ..diagnostics import NOWHERE, Loc


def _loc():
    return field(default=NOWHERE, compare=False, repr=False)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Ident:
    name: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class Number:
    width: Optional[int]
    base: Optional[str]  # None for a plain decimal
    digits: str
    signed: bool = False
    loc: Loc = _loc()

    @property
    def value(self) -> Optional[int]:
        if any(c in "xz?" for c in self.digits):
            return None
        return int(self.digits, {None: 10, "d": 10, "b": 2, "o": 8, "h": 16}[self.base])


@dataclass(frozen=True)
class BitSelect:
    base: "Expr"
    index: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class PartSelect:
    base: "Expr"
    left: "Expr"
    right: "Expr"
    mode: str = ":"  # ":" | "+:" | "-:"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    if_true: "Expr"
    if_false: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Concat:
    items: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class Repl:
    count: "Expr"
    items: tuple
    loc: Loc = _loc()


Expr = Union[Ident, Number, BitSelect, PartSelect, Unary, Binary, Ternary, Concat, Repl]


def walk_expr(e: Expr) -> Iterator[Expr]:
    """Yield ``e`` and all of its sub-expressions, pre-order."""
    yield e
    if isinstance(e, BitSelect):
        yield from walk_expr(e.base)
        yield from walk_expr(e.index)
    elif isinstance(e, PartSelect):
        yield from walk_expr(e.base)
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, Unary):
        yield from walk_expr(e.operand)
    elif isinstance(e, Binary):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, Ternary):
        yield from walk_expr(e.cond)
        yield from walk_expr(e.if_true)
        yield from walk_expr(e.if_false)
    elif isinstance(e, Concat):
        for item in e.items:
            yield from walk_expr(item)
    elif isinstance(e, Repl):
        yield from walk_expr(e.count)
        for item in e.items:
            yield from walk_expr(item)


def idents(e: Expr) -> list[Ident]:
    return [x for x in walk_expr(e) if isinstance(x, Ident)]


def base_ident(e: Expr) -> Optional[Ident]:
    """The signal named by an lvalue-shaped expression (ident or select)."""
    while isinstance(e, (BitSelect, PartSelect)):
        e = e.base
    return e if isinstance(e, Ident) else None


def lvalue_targets(e: Expr) -> list[tuple[Ident, Optional[Expr]]]:
    """Signals written by an lvalue, each with its select (or None)."""
    if isinstance(e, Concat):
        out = []
        for item in e.items:
            out.extend(lvalue_targets(item))
        return out
    ident = base_ident(e)
    if ident is None:
        return []
    return [(ident, None if e is ident else e)]


def select_indices(e: Expr) -> list[Expr]:
    """Index expressions used inside selects of an lvalue (these are reads)."""
    out: list[Expr] = []
    if isinstance(e, Concat):
        for item in e.items:
            out.extend(select_indices(item))
        return out
    while isinstance(e, (BitSelect, PartSelect)):
        if isinstance(e, BitSelect):
            out.append(e.index)
        elif e.mode != ":":
            out.append(e.left)
        e = e.base
    return out


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    lhs: Expr
    rhs: Expr
    blocking: bool
    loc: Loc = _loc()


@dataclass(frozen=True)
class Block:
    stmts: tuple
    label: Optional[str] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    otherwise: Optional["Stmt"] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class CaseItem:
    labels: tuple  # empty tuple means ``default``
    body: "Stmt"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Case:
    kind: str  # case | casez | casex
    subject: Expr
    items: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class NullStmt:
    loc: Loc = _loc()


Stmt = Union[Assign, Block, If, Case, NullStmt]


# -- module items ------------------------------------------------------------


@dataclass(frozen=True)
class Range:
    msb: Expr
    lsb: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class ParamDecl:
    name: str
    value: Expr
    local: bool = False
    range: Optional[Range] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class PortDecl:
    name: str
    direction: str  # input | output | inout
    net_type: str = "wire"  # wire | reg
    signed: bool = False
    range: Optional[Range] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class NetDecl:
    name: str
    kind: str  # wire | reg | integer
    signed: bool = False
    range: Optional[Range] = None
    array: Optional[Range] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class ContinuousAssign:
    lhs: Expr
    rhs: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class EventExpr:
    edge: Optional[str]  # posedge | negedge | None
    signal: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Always:
    star: bool
    events: tuple  # of EventExpr; empty when star
    body: Stmt
    loc: Loc = _loc()

    @property
    def clocked(self) -> bool:
        return any(ev.edge for ev in self.events)


@dataclass(frozen=True)
class Initial:
    body: Stmt
    loc: Loc = _loc()


@dataclass(frozen=True)
class Connection:
    formal: Optional[str]  # None for positional
    actual: Optional[Expr]  # None for an explicitly open named port ``.p()``
    loc: Loc = _loc()


@dataclass(frozen=True)
class InstanceDecl:
    module: str
    name: str
    params: tuple = ()  # of Connection (named or positional overrides)
    connections: tuple = ()  # of Connection
    loc: Loc = _loc()

    @property
    def positional(self) -> bool:
        return any(c.formal is None for c in self.connections)


ModuleItem = Union[ContinuousAssign, Always, Initial, InstanceDecl]


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    params: tuple = ()  # of ParamDecl
    ports: tuple = ()  # of PortDecl, header order
    nets: tuple = ()  # of NetDecl
    items: tuple = ()  # of ModuleItem
    loc: Loc = _loc()
    end_loc: Loc = _loc()

    def port(self, name: str) -> Optional[PortDecl]:
        for p in self.ports:
            if p.name == name:
                return p
        return None

    def net(self, name: str) -> Optional[NetDecl]:
        for n in self.nets:
            if n.name == name:
                return n
        return None

    def param(self, name: str) -> Optional[ParamDecl]:
        for p in self.params:
            if p.name == name:
                return p
        return None

    @property
    def instances(self) -> list[InstanceDecl]:
        return [i for i in self.items if isinstance(i, InstanceDecl)]


@dataclass(frozen=True)
class SourceUnit:
    files: tuple = field(default=(), compare=False)  # of (path, text)
    modules: tuple = ()  # of ModuleDecl
    diagnostics: tuple = field(default=(), compare=False)

    def module(self, name: str) -> Optional[ModuleDecl]:
        for m in self.modules:
            if m.name == name:
                return m
        return None
