"""Recursive-descent parser for the synthesizable Verilog subset.

The accepted grammar is documented in ``docs/verilog_subset.ebnf``. Anything
outside it (generate blocks, functions, tasks, gate primitives, macros, ...)
raises :class:`ParseError` naming the construct.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..diagnostics import Diagnostic, DiagnosticError, Loc, warning
from . import ast as A
from .lexer import Token, tokenize


class ParseError(DiagnosticError):
    def __init__(self, message: str, loc: Loc, expected: Iterable[str] = ()):
        self.expected = frozenset(expected)
        super().__init__(message, loc)


UNSUPPORTED_KEYWORDS = frozenset(
    """
    generate endgenerate genvar function endfunction task endtask specify
    endspecify primitive endprimitive interface endinterface for while repeat
    forever fork join defparam supply0 supply1 tri wand wor real realtime time
    event automatic
    """.split()
)
GATE_PRIMITIVES = frozenset("and nand nor xor xnor not buf bufif0 bufif1 notif0 notif1 or".split())
DIRECTIONS = ("input", "output", "inout")

BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4, "~^": 4, "^~": 4,
    "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "<<<": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
    "**": 11,
}
UNARY_OPS = frozenset("+ - ! ~ & ~& | ~| ^ ~^ ^~".split())

_MODULE_ITEM_START = {
    "input", "output", "inout", "wire", "reg", "integer", "parameter",
    "localparam", "assign", "always", "initial", "endmodule", "<instance>",
}


class _Parser:
    def __init__(self, tokens: Sequence[Token]):
        self.toks = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers -------------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind in ("op", "kw") and tok.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.next()
        self.fail({text})

    def expect_id(self) -> Token:
        tok = self.peek()
        if tok.kind == "id":
            return self.next()
        self.fail({"identifier"})

    def fail(self, expected: Iterable[str], tok: Optional[Token] = None):
        tok = tok or self.peek()
        self.check_unsupported(tok)
        expected = sorted(expected)
        got = "end of input" if tok.kind == "eof" else repr(tok.text)
        shown = expected[0] if len(expected) == 1 else "one of " + ", ".join(expected)
        raise ParseError(f"expected {shown}, got {got}", tok.loc, expected)

    def check_unsupported(self, tok: Token) -> None:
        if tok.kind == "kw" and tok.text in UNSUPPORTED_KEYWORDS:
            raise ParseError(f"unsupported construct: {tok.text}", tok.loc)
        if tok.kind == "directive":
            raise ParseError(f"unsupported construct: compiler directive {tok.text.split()[0]}", tok.loc)
        if tok.kind == "sysid":
            raise ParseError(f"unsupported construct: system task/function {tok.text}", tok.loc)
        if tok.kind == "str":
            raise ParseError("unsupported construct: string literal", tok.loc)

    # -- source --------------------------------------------------------------

    def source(self) -> list[A.ModuleDecl]:
        modules = []
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "directive" and tok.text.startswith("`timescale"):
                self.next()
                self.diagnostics.append(warning("`timescale ignored", tok.loc))
                continue
            if self.at("module") or self.at("macromodule"):
                modules.append(self.module())
                continue
            self.fail({"module"})
        return modules

    def module(self) -> A.ModuleDecl:
        start = self.next()
        name = self.expect_id().text
        params: list[A.ParamDecl] = []
        if self.accept("#"):
            self.expect("(")
            params.extend(self.param_port_list())
            self.expect(")")

        header_names: list[tuple[str, Loc]] = []
        ansi_ports: list[A.PortDecl] = []
        ansi = False
        if self.accept("("):
            if not self.at(")"):
                if self.peek().text in DIRECTIONS:
                    ansi = True
                    ansi_ports = self.ansi_ports()
                else:
                    while True:
                        tok = self.expect_id()
                        header_names.append((tok.text, tok.loc))
                        if not self.accept(","):
                            break
            self.expect(")")
        self.expect(";")

        body_ports: dict[str, A.PortDecl] = {}
        nets: list[A.NetDecl] = []
        items: list = []
        reg_ports: set[str] = set()
        header_set = {n for n, _ in header_names}
        if ansi:
            header_set = {p.name for p in ansi_ports}

        while not self.at("endmodule"):
            tok = self.peek()
            if tok.kind == "eof":
                self.fail({"endmodule"})
            if tok.kind == "kw" and tok.text in DIRECTIONS:
                if ansi:
                    raise ParseError(f"port '{self.peek(1).text}' redeclared in body of ANSI-style module", tok.loc)
                for p in self.port_decl():
                    if p.name not in header_set:
                        raise ParseError(f"'{p.name}' is not in the port list of module '{name}'", p.loc)
                    if p.name in body_ports:
                        raise ParseError(f"port '{p.name}' declared twice", p.loc)
                    body_ports[p.name] = p
            elif self.at("wire") or self.at("reg") or self.at("integer"):
                for decl in self.net_decl(items):
                    if decl.name in header_set:
                        if decl.kind == "reg":
                            reg_ports.add(decl.name)
                        continue
                    if any(n.name == decl.name for n in nets):
                        raise ParseError(f"redeclaration of '{decl.name}'", decl.loc)
                    nets.append(decl)
            elif self.at("parameter") or self.at("localparam"):
                params.extend(self.param_decl())
                self.expect(";")
            elif self.at("assign"):
                items.extend(self.continuous_assign())
            elif self.at("always"):
                items.append(self.always())
            elif self.at("initial"):
                self.next()
                body = self.statement()
                self.diagnostics.append(warning("initial block ignored", tok.loc))
                items.append(A.Initial(body, loc=tok.loc))
            elif tok.kind == "id":
                items.extend(self.instances())
            elif tok.kind == "kw" and tok.text in GATE_PRIMITIVES:
                raise ParseError(f"unsupported construct: {tok.text} (gate primitive)", tok.loc)
            else:
                self.fail(_MODULE_ITEM_START)
        end = self.expect("endmodule")

        if ansi:
            ports = [
                A.PortDecl(p.name, p.direction, "reg" if p.name in reg_ports else p.net_type,
                           p.signed, p.range, loc=p.loc)
                for p in ansi_ports
            ]
        else:
            ports = []
            for pname, ploc in header_names:
                decl = body_ports.get(pname)
                if decl is None:
                    raise ParseError(f"port '{pname}' has no direction declaration", ploc)
                net_type = "reg" if pname in reg_ports else decl.net_type
                ports.append(A.PortDecl(pname, decl.direction, net_type, decl.signed, decl.range, loc=decl.loc))
        seen = set()
        for p in ports:
            if p.name in seen:
                raise ParseError(f"duplicate port '{p.name}'", p.loc)
            seen.add(p.name)
        pnames = set()
        for p in params:
            if p.name in pnames:
                raise ParseError(f"duplicate parameter '{p.name}'", p.loc)
            pnames.add(p.name)
        return A.ModuleDecl(name, tuple(params), tuple(ports), tuple(nets), tuple(items),
                            loc=start.loc, end_loc=end.loc)

    # -- declarations --------------------------------------------------------

    def param_port_list(self) -> list[A.ParamDecl]:
        out: list[A.ParamDecl] = []
        local = False
        rng = None
        while True:
            if self.at("parameter") or self.at("localparam"):
                local = self.next().text == "localparam"
                self.accept("integer")
                self.accept("signed")
                rng = self.range() if self.at("[") else None
            tok = self.expect_id()
            self.expect("=")
            out.append(A.ParamDecl(tok.text, self.expr(), local, rng, loc=tok.loc))
            if not self.accept(","):
                return out

    def param_decl(self) -> list[A.ParamDecl]:
        local = self.next().text == "localparam"
        self.accept("integer")
        self.accept("signed")
        rng = self.range() if self.at("[") else None
        out = []
        while True:
            tok = self.expect_id()
            self.expect("=")
            out.append(A.ParamDecl(tok.text, self.expr(), local, rng, loc=tok.loc))
            if not self.accept(","):
                return out

    def ansi_ports(self) -> list[A.PortDecl]:
        out: list[A.PortDecl] = []
        direction = net_type = None
        signed = False
        rng = None
        while True:
            if self.peek().kind == "kw" and self.peek().text in DIRECTIONS:
                direction = self.next().text
                net_type = "wire"
                if self.at("wire") or self.at("reg"):
                    net_type = self.next().text
                signed = bool(self.accept("signed"))
                rng = self.range() if self.at("[") else None
            tok = self.expect_id()
            out.append(A.PortDecl(tok.text, direction, net_type, signed, rng, loc=tok.loc))
            if not self.accept(","):
                return out

    def port_decl(self) -> list[A.PortDecl]:
        direction = self.next().text
        net_type = "wire"
        if self.at("wire") or self.at("reg"):
            net_type = self.next().text
        signed = bool(self.accept("signed"))
        rng = self.range() if self.at("[") else None
        out = []
        while True:
            tok = self.expect_id()
            out.append(A.PortDecl(tok.text, direction, net_type, signed, rng, loc=tok.loc))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def net_decl(self, items: list) -> list[A.NetDecl]:
        kind = self.next().text
        signed = bool(self.accept("signed"))
        rng = None
        if kind == "integer":
            signed = True
            rng = A.Range(A.Number(None, None, "31"), A.Number(None, None, "0"))
        elif self.at("["):
            rng = self.range()
        out = []
        while True:
            tok = self.expect_id()
            array = self.range() if self.at("[") else None
            out.append(A.NetDecl(tok.text, kind, signed, rng, array, loc=tok.loc))
            if self.at("="):
                eq = self.next()
                init = self.expr()
                if kind == "wire":
                    items.append(A.ContinuousAssign(A.Ident(tok.text, loc=tok.loc), init, loc=eq.loc))
                else:
                    self.diagnostics.append(warning(f"initializer of '{tok.text}' ignored", eq.loc))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def range(self) -> A.Range:
        start = self.expect("[")
        msb = self.expr()
        self.expect(":")
        lsb = self.expr()
        self.expect("]")
        return A.Range(msb, lsb, loc=start.loc)

    # -- items ---------------------------------------------------------------

    def continuous_assign(self) -> list[A.ContinuousAssign]:
        start = self.next()
        if self.at("#"):
            raise ParseError("unsupported construct: delay control", self.peek().loc)
        out = []
        while True:
            lhs = self.lvalue()
            self.expect("=")
            out.append(A.ContinuousAssign(lhs, self.expr(), loc=start.loc))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def always(self) -> A.Always:
        start = self.next()
        if not self.at("@"):
            raise ParseError("unsupported construct: always block without event control", self.peek().loc)
        self.next()
        star = False
        events: list[A.EventExpr] = []
        if self.accept("*"):
            star = True
        else:
            self.expect("(")
            if self.accept("*"):
                star = True
            else:
                while True:
                    tok = self.peek()
                    edge = None
                    if self.at("posedge") or self.at("negedge"):
                        edge = self.next().text
                    events.append(A.EventExpr(edge, self.select_chain(), loc=tok.loc))
                    if not (self.accept("or") or self.accept(",")):
                        break
            self.expect(")")
        return A.Always(star, tuple(events), self.statement(), loc=start.loc)

    def instances(self) -> list[A.InstanceDecl]:
        mod = self.next()
        params: list[A.Connection] = []
        if self.at("#"):
            self.next()
            self.expect("(")
            params = self.connection_list(allow_empty_positional=False)
            self.expect(")")
        out = []
        while True:
            name = self.expect_id()
            if self.at("["):
                raise ParseError("unsupported construct: instance array", self.peek().loc)
            self.expect("(")
            conns = self.connection_list(allow_empty_positional=True)
            self.expect(")")
            out.append(A.InstanceDecl(mod.text, name.text, tuple(params), tuple(conns), loc=name.loc))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def connection_list(self, allow_empty_positional: bool) -> list[A.Connection]:
        conns: list[A.Connection] = []
        if self.at(")"):
            return conns
        while True:
            tok = self.peek()
            if self.accept("."):
                if self.at("*"):
                    raise ParseError("unsupported construct: .* wildcard connection", tok.loc)
                formal = self.expect_id().text
                self.expect("(")
                actual = None if self.at(")") else self.expr()
                self.expect(")")
                conns.append(A.Connection(formal, actual, loc=tok.loc))
            elif allow_empty_positional and (self.at(",") or self.at(")")):
                conns.append(A.Connection(None, None, loc=tok.loc))
            else:
                conns.append(A.Connection(None, self.expr(), loc=tok.loc))
            if not self.accept(","):
                break
        if len({c.formal is None for c in conns}) > 1:
            raise ParseError("mixed named and positional connections", conns[0].loc)
        return conns

    # -- statements ----------------------------------------------------------

    def statement(self) -> A.Stmt:
        tok = self.peek()
        if self.accept("begin"):
            label = None
            if self.accept(":"):
                label = self.expect_id().text
            stmts = []
            while not self.at("end"):
                if self.peek().kind == "eof":
                    self.fail({"end"})
                stmts.append(self.statement())
            self.next()
            return A.Block(tuple(stmts), label, loc=tok.loc)
        if self.accept("if"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.statement()
            otherwise = self.statement() if self.accept("else") else None
            return A.If(cond, then, otherwise, loc=tok.loc)
        if self.at("case") or self.at("casez") or self.at("casex"):
            kind = self.next().text
            self.expect("(")
            subject = self.expr()
            self.expect(")")
            items = []
            while not self.accept("endcase"):
                itok = self.peek()
                if itok.kind == "eof":
                    self.fail({"endcase"})
                if self.accept("default"):
                    self.accept(":")
                    items.append(A.CaseItem((), self.statement(), loc=itok.loc))
                    continue
                labels = [self.expr()]
                while self.accept(","):
                    labels.append(self.expr())
                self.expect(":")
                items.append(A.CaseItem(tuple(labels), self.statement(), loc=itok.loc))
            return A.Case(kind, subject, tuple(items), loc=tok.loc)
        if self.accept(";"):
            return A.NullStmt(loc=tok.loc)
        if self.at("#"):
            raise ParseError("unsupported construct: delay control", tok.loc)
        if self.at("@"):
            raise ParseError("unsupported construct: event control inside a statement", tok.loc)
        if tok.kind == "id" or self.at("{"):
            lhs = self.lvalue()
            if self.at("="):
                blocking = True
            elif self.at("<="):
                blocking = False
            else:
                self.fail({"=", "<="})
            self.next()
            if self.at("#") or self.at("@"):
                raise ParseError("unsupported construct: intra-assignment timing control", self.peek().loc)
            rhs = self.expr()
            self.expect(";")
            return A.Assign(lhs, rhs, blocking, loc=tok.loc)
        self.fail({"begin", "if", "case", "casez", "casex", ";", "identifier", "{"})

    def lvalue(self) -> A.Expr:
        tok = self.peek()
        if self.accept("{"):
            items = [self.lvalue()]
            while self.accept(","):
                items.append(self.lvalue())
            self.expect("}")
            return A.Concat(tuple(items), loc=tok.loc)
        return self.select_chain()

    def select_chain(self) -> A.Expr:
        tok = self.expect_id()
        node: A.Expr = A.Ident(tok.text, loc=tok.loc)
        return self.selects(node)

    def selects(self, node: A.Expr) -> A.Expr:
        while self.at("["):
            start = self.next()
            first = self.expr()
            for mode in (":", "+:", "-:"):
                if self.accept(mode):
                    second = self.expr()
                    self.expect("]")
                    node = A.PartSelect(node, first, second, mode, loc=start.loc)
                    break
            else:
                self.expect("]")
                node = A.BitSelect(node, first, loc=start.loc)
        return node

    # -- expressions ---------------------------------------------------------

    def expr(self) -> A.Expr:
        cond = self.binary(1)
        if self.at("?"):
            q = self.next()
            if_true = self.expr()
            self.expect(":")
            if_false = self.expr()
            return A.Ternary(cond, if_true, if_false, loc=q.loc)
        return cond

    def binary(self, min_prec: int) -> A.Expr:
        left = self.unary()
        while True:
            tok = self.peek()
            prec = BINARY_PRECEDENCE.get(tok.text) if tok.kind == "op" else None
            if prec is None or prec < min_prec:
                return left
            self.next()
            # ``**`` is right associative, everything else left
            right = self.binary(prec if tok.text == "**" else prec + 1)
            left = A.Binary(tok.text, left, right, loc=tok.loc)

    def unary(self) -> A.Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text in UNARY_OPS:
            self.next()
            return A.Unary(tok.text, self.unary(), loc=tok.loc)
        return self.primary()

    def primary(self) -> A.Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return A.Number(tok.width, tok.base, tok.digits, tok.signed, loc=tok.loc)
        if tok.kind == "id":
            if self.at("(", 1):
                raise ParseError(f"unsupported construct: function call '{tok.text}'", tok.loc)
            return self.select_chain()
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        if self.accept("{"):
            first = self.expr()
            if self.at("{"):
                self.next()
                items = [self.expr()]
                while self.accept(","):
                    items.append(self.expr())
                self.expect("}")
                self.expect("}")
                return A.Repl(first, tuple(items), loc=tok.loc)
            items = [first]
            while self.accept(","):
                items.append(self.expr())
            self.expect("}")
            return A.Concat(tuple(items), loc=tok.loc)
        self.fail({"expression"})


def parse(tokens: Sequence[Token], files: tuple = ()) -> A.SourceUnit:
    """Build a SourceUnit from a token stream produced by :func:`tokenize`."""
    p = _Parser(tokens)
    modules = p.source()
    _check_unique(modules)
    return A.SourceUnit(files, tuple(modules), tuple(p.diagnostics))


def parse_text(text: str, file: str = "<input>") -> A.SourceUnit:
    return parse(tokenize(text, file), ((file, text),))


def parse_sources(sources: Iterable[tuple[str, str]]) -> A.SourceUnit:
    """Parse several (path, text) pairs into one unit."""
    files, modules, diags = [], [], []
    for path, text in sources:
        unit = parse_text(text, path)
        files.extend(unit.files)
        modules.extend(unit.modules)
        diags.extend(unit.diagnostics)
    _check_unique(modules)
    return A.SourceUnit(tuple(files), tuple(modules), tuple(diags))


def parse_files(paths: Iterable[str | Path]) -> A.SourceUnit:
    return parse_sources((str(p), Path(p).read_text(encoding="utf-8")) for p in paths)


def _check_unique(modules: Sequence[A.ModuleDecl]) -> None:
    seen: dict[str, A.ModuleDecl] = {}
    for m in modules:
        if m.name in seen:
            raise ParseError(f"duplicate definition of module '{m.name}' (first at {seen[m.name].loc})", m.loc)
        seen[m.name] = m
