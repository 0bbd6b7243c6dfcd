"""Recognizer and printer for the single-clock implication assertion template.

    assertion := "assert" "property" "(" "@(posedge" clockref ")" group "|->" group ")" ";"
    group     := "(" apexpr ")"
    apexpr    := ap { ("&&" | "||") ap }
    ap        := ["!"] sigref | sigref relop operand | "(" apexpr ")"
    sigref    := name "." name [bitsel]
    operand   := literal | sigref
    clockref  := name | name "." name

``&&`` binds tighter than ``||``; both associate to the left. Parentheses are
kept in the tree so that printing reproduces the written grouping.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

RELOPS = ("==", "!=", "<=", ">=", "<", ">")

TEMPLATE_LINE = "assert property (@(posedge <CLK>) (<AP> { && <AP> } { || <AP> }) |-> (<AP> { && <AP> } { || <AP> }));"

TEMPLATE_GRAMMAR = f"""{TEMPLATE_LINE}

assertion := "assert" "property" "(" "@(posedge" clockref ")" group "|->" group ")" ";"
group     := "(" apexpr ")"
apexpr    := ap {{ ("&&" | "||") ap }}
ap        := ["!"] sigref | sigref relop operand | "(" apexpr ")"
sigref    := name "." name [bitsel]
operand   := literal | sigref
relop     := "==" | "!=" | "<" | "<=" | ">" | ">="
literal   := decimal | N'b... | N'h... | N'd...
No $past, no ## delays, no |=> and no sequence operators."""


class SvaSyntaxError(Exception):
    def __init__(self, message: str, col: int):
        self.message = message
        self.col = col  # 1-based column in the assertion text
        super().__init__(f"col {col}: {message}")


# -- tokens ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<literal>\d+\s*'\s*(?:[bB][01_]+|[hH][0-9a-fA-F_]+|[dD][0-9_]+)|\d[0-9_]*)
  | (?P<bad>\#\#|\|=>|\$[A-Za-z_]\w*|'[sS]?[bBhHdDoO]\w*)
  | (?P<op>\|->|&&|\|\||==|!=|<=|>=|[<>!()@;.\[\]:])
  | (?P<name>[A-Za-z_]\w*)
    """,
    re.VERBOSE,
)

_OUT_OF_TEMPLATE = {"##": "## delay", "|=>": "non-overlapping implication |=>"}


@dataclass(frozen=True)
class Tok:
    kind: str  # literal, op, name, end
    text: str
    col: int


def tokenize(text: str) -> list[Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SvaSyntaxError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = m.lastgroup
        if kind == "bad":
            tok = m.group()
            what = _OUT_OF_TEMPLATE.get(tok) or (f"system function {tok}" if tok.startswith("$") else
                                                  f"unsized based literal {tok}")
            raise SvaSyntaxError(f"out-of-template construct: {what}", pos + 1)
        if kind != "ws":
            out.append(Tok(kind, m.group(), pos + 1))
        pos = m.end()
    out.append(Tok("end", "", len(text) + 1))
    return out


# -- tree --------------------------------------------------------------------


@dataclass(frozen=True)
class SigRef:
    module: str
    signal: str
    msb: Optional[int] = None
    lsb: Optional[int] = None  # set only for part selects

    def __str__(self) -> str:
        if self.msb is None:
            sel = ""
        elif self.lsb is None:
            sel = f"[{self.msb}]"
        else:
            sel = f"[{self.msb}:{self.lsb}]"
        return f"{self.module}.{self.signal}{sel}"


@dataclass(frozen=True)
class ClockRef:
    name: str
    module: Optional[str] = None

    def __str__(self) -> str:
        return f"{self.module}.{self.name}" if self.module else self.name


@dataclass(frozen=True)
class Literal:
    text: str

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class Sig:
    ref: SigRef
    negated: bool = False


@dataclass(frozen=True)
class Cmp:
    left: SigRef
    op: str
    right: Union[SigRef, Literal]


@dataclass(frozen=True)
class Paren:
    expr: "APExpr"


@dataclass(frozen=True)
class BoolOp:
    op: str  # && or ||
    left: "APExpr"
    right: "APExpr"


APExpr = Union[Sig, Cmp, Paren, BoolOp]


@dataclass(frozen=True)
class Assertion:
    clock: ClockRef
    antecedent: APExpr
    consequent: APExpr


def sigrefs(e: APExpr) -> Iterator[SigRef]:
    if isinstance(e, Sig):
        yield e.ref
    elif isinstance(e, Cmp):
        yield e.left
        if isinstance(e.right, SigRef):
            yield e.right
    elif isinstance(e, Paren):
        yield from sigrefs(e.expr)
    else:
        yield from sigrefs(e.left)
        yield from sigrefs(e.right)


def atoms(e: APExpr) -> list:
    if isinstance(e, (Sig, Cmp)):
        return [e]
    if isinstance(e, Paren):
        return atoms(e.expr)
    return atoms(e.left) + atoms(e.right)


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def fail(self, expected: str):
        got = self.tok.text or "end of text"
        raise SvaSyntaxError(f"expected {expected}, got {got!r}", self.tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.fail(text)

    def name(self) -> str:
        if self.tok.kind != "name" or self.tok.text in ("assert", "property", "posedge"):
            self.fail("identifier")
        t = self.tok.text
        self.i += 1
        return t

    def number(self) -> int:
        if self.tok.kind != "literal" or not self.tok.text.isdigit():
            self.fail("bit index")
        v = int(self.tok.text)
        self.i += 1
        return v

    def assertion(self) -> Assertion:
        self.expect("assert")
        self.expect("property")
        self.expect("(")
        self.expect("@")
        self.expect("(")
        self.expect("posedge")
        first = self.name()
        clock = ClockRef(self.name(), first) if self.accept(".") else ClockRef(first)
        self.expect(")")
        ante = self.group()
        self.expect("|->")
        cons = self.group()
        self.expect(")")
        self.expect(";")
        if self.tok.kind != "end":
            self.fail("end of assertion")
        return Assertion(clock, ante, cons)

    def group(self) -> APExpr:
        self.expect("(")
        e = self.apexpr()
        self.expect(")")
        return e

    def apexpr(self) -> APExpr:
        left = self.conj()
        while self.accept("||"):
            left = BoolOp("||", left, self.conj())
        return left

    def conj(self) -> APExpr:
        left = self.ap()
        while self.accept("&&"):
            left = BoolOp("&&", left, self.ap())
        return left

    def ap(self) -> APExpr:
        if self.accept("("):
            e = self.apexpr()
            self.expect(")")
            return Paren(e)
        if self.accept("!"):
            return Sig(self.sigref(), True)
        left = self.sigref()
        if self.tok.kind == "op" and self.tok.text in RELOPS:
            op = self.tok.text
            self.i += 1
            return Cmp(left, op, self.operand())
        return Sig(left)

    def sigref(self) -> SigRef:
        module = self.name()
        self.expect(".")
        signal = self.name()
        if not self.accept("["):
            return SigRef(module, signal)
        msb = self.number()
        lsb = self.number() if self.accept(":") else None
        self.expect("]")
        return SigRef(module, signal, msb, lsb)

    def operand(self):
        if self.tok.kind == "literal":
            text = re.sub(r"\s+", "", self.tok.text)
            self.i += 1
            return Literal(text)
        if self.tok.kind == "name":
            return self.sigref()
        self.fail("literal or signal")


def parse_assertion(text: str) -> Assertion:
    """Parse one assertion; raise SvaSyntaxError with a 1-based column."""
    return _Parser(text).assertion()


# -- printer -----------------------------------------------------------------


def print_ap(e: APExpr) -> str:
    if isinstance(e, Sig):
        return ("!" if e.negated else "") + str(e.ref)
    if isinstance(e, Cmp):
        return f"{e.left} {e.op} {e.right}"
    if isinstance(e, Paren):
        return f"({print_ap(e.expr)})"
    return f"{print_ap(e.left)} {e.op} {print_ap(e.right)}"


def print_assertion(a: Assertion) -> str:
    return f"assert property (@(posedge {a.clock}) ({print_ap(a.antecedent)}) |-> ({print_ap(a.consequent)}));"
