"""Pretty-printer for the Verilog AST.

Output is normalized (ANSI port headers, one declaration per line, fully
parenthesized sub-expressions) rather than faithful to the input layout;
re-parsing it yields a structurally equal tree.
"""

from __future__ import annotations

from . import ast as A


def print_expr(e: A.Expr) -> str:
    if isinstance(e, A.Ident):
        return e.name
    if isinstance(e, A.Number):
        if e.base is None:
            return e.digits
        size = str(e.width) if e.width is not None else ""
        return f"{size}'{'s' if e.signed else ''}{e.base}{e.digits}"
    if isinstance(e, A.BitSelect):
        return f"{print_expr(e.base)}[{print_expr(e.index)}]"
    if isinstance(e, A.PartSelect):
        return f"{print_expr(e.base)}[{print_expr(e.left)}{e.mode}{print_expr(e.right)}]"
    if isinstance(e, A.Unary):
        return f"{e.op}{_wrap(e.operand)}"
    if isinstance(e, A.Binary):
        return f"{_wrap(e.left)} {e.op} {_wrap(e.right)}"
    if isinstance(e, A.Ternary):
        return f"{_wrap(e.cond)} ? {_wrap(e.if_true)} : {_wrap(e.if_false)}"
    if isinstance(e, A.Concat):
        return "{" + ", ".join(print_expr(i) for i in e.items) + "}"
    if isinstance(e, A.Repl):
        return "{" + _wrap(e.count) + "{" + ", ".join(print_expr(i) for i in e.items) + "}}"
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e: A.Expr) -> str:
    text = print_expr(e)
    if isinstance(e, (A.Unary, A.Binary, A.Ternary)):
        return f"({text})"
    return text


def _range(r: A.Range | None) -> str:
    return f"[{print_expr(r.msb)}:{print_expr(r.lsb)}] " if r is not None else ""


def print_stmt(s: A.Stmt, indent: int = 1) -> list[str]:
    pad = "  " * indent
    if isinstance(s, A.Assign):
        op = "=" if s.blocking else "<="
        return [f"{pad}{print_expr(s.lhs)} {op} {print_expr(s.rhs)};"]
    if isinstance(s, A.Block):
        head = f"{pad}begin" + (f" : {s.label}" if s.label else "")
        lines = [head]
        for inner in s.stmts:
            lines.extend(print_stmt(inner, indent + 1))
        lines.append(f"{pad}end")
        return lines
    if isinstance(s, A.If):
        lines = [f"{pad}if ({print_expr(s.cond)})"]
        lines.extend(print_stmt(_guard_dangling_else(s), indent + 1))
        if s.otherwise is not None:
            lines.append(f"{pad}else")
            lines.extend(print_stmt(s.otherwise, indent + 1))
        return lines
    if isinstance(s, A.Case):
        lines = [f"{pad}{s.kind} ({print_expr(s.subject)})"]
        for item in s.items:
            label = ", ".join(print_expr(x) for x in item.labels) if item.labels else "default"
            lines.append(f"{pad}  {label}:")
            lines.extend(print_stmt(item.body, indent + 2))
        lines.append(f"{pad}endcase")
        return lines
    if isinstance(s, A.NullStmt):
        return [f"{pad};"]
    raise TypeError(f"not a statement: {s!r}")


def _guard_dangling_else(s: A.If) -> A.Stmt:
    # an else-less inner if would capture our else on re-parse
    if s.otherwise is not None and isinstance(s.then, A.If) and s.then.otherwise is None:
        return A.Block((s.then,))
    return s.then


def print_module(m: A.ModuleDecl) -> str:
    ports = []
    for p in m.ports:
        signed = "signed " if p.signed else ""
        ports.append(f"  {p.direction} {p.net_type} {signed}{_range(p.range)}{p.name}")
    lines = [f"module {m.name} ("]
    lines.append(",\n".join(ports))
    lines.append(");")
    for p in m.params:
        kw = "localparam" if p.local else "parameter"
        lines.append(f"  {kw} {_range(p.range)}{p.name} = {print_expr(p.value)};")
    for n in m.nets:
        if n.kind == "integer":
            lines.append(f"  integer {n.name}{' ' + _range(n.array).strip() if n.array else ''};")
            continue
        signed = "signed " if n.signed else ""
        array = " " + _range(n.array).strip() if n.array else ""
        lines.append(f"  {n.kind} {signed}{_range(n.range)}{n.name}{array};")
    for item in m.items:
        lines.extend(_print_item(item))
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def _print_item(item) -> list[str]:
    if isinstance(item, A.ContinuousAssign):
        return [f"  assign {print_expr(item.lhs)} = {print_expr(item.rhs)};"]
    if isinstance(item, A.Always):
        if item.star:
            sens = "*"
        else:
            sens = " or ".join(
                (f"{ev.edge} " if ev.edge else "") + print_expr(ev.signal) for ev in item.events
            )
        return [f"  always @({sens})"] + print_stmt(item.body, 2)
    if isinstance(item, A.Initial):
        return ["  initial"] + print_stmt(item.body, 2)
    if isinstance(item, A.InstanceDecl):
        params = ""
        if item.params:
            params = " #(" + ", ".join(_conn(c) for c in item.params) + ")"
        conns = ", ".join(_conn(c) for c in item.connections)
        return [f"  {item.module}{params} {item.name} ({conns});"]
    raise TypeError(f"not a module item: {item!r}")


def _conn(c: A.Connection) -> str:
    actual = print_expr(c.actual) if c.actual is not None else ""
    if c.formal is None:
        return actual
    return f".{c.formal}({actual})"


def print_source(unit: A.SourceUnit) -> str:
    return "\n".join(print_module(m) for m in unit.modules)
