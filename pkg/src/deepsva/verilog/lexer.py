"""Tokenizer for the synthesizable Verilog-2005 subset."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..diagnostics import DiagnosticError, Loc

KEYWORDS = frozenset(
    """
    module macromodule endmodule input output inout wire reg integer signed
    parameter localparam assign always initial begin end if else case casez
    casex endcase default posedge negedge or
    generate endgenerate genvar function endfunction task endtask specify
    endspecify primitive endprimitive interface endinterface for while repeat
    forever fork join defparam supply0 supply1 tri wand wor real realtime time
    event automatic
    and nand nor xor xnor not buf bufif0 bufif1 notif0 notif1
    """.split()
)

# longest first so that maximal munch works with a simple scan
OPERATORS = sorted(
    """
    <<< >>> === !== ~& ~| ~^ ^~ && || == != <= >= << >> ** +: -: ->
    + - * / % & | ^ ~ ! < > ? : = ( ) [ ] { } , ; . @ #
    """.split(),
    key=len,
    reverse=True,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")
_SYSIDENT = re.compile(r"\$[A-Za-z_][A-Za-z0-9_$]*")
_DECIMAL = re.compile(r"[0-9][0-9_]*")
_BASED = re.compile(r"'([sS]?)([bBoOdDhH])\s*([0-9a-fA-FxXzZ?_]+)")
_DIRECTIVE = re.compile(r"`[A-Za-z_][A-Za-z0-9_]*")

_BASE_NAMES = {"b": "bin", "o": "oct", "d": "dec", "h": "hex"}
_BASE_RADIX = {"b": 2, "o": 8, "d": 10, "h": 16}
_BASE_DIGITS = {
    "b": set("01xz?"),
    "o": set("01234567xz?"),
    "d": set("0123456789"),
    "h": set("0123456789abcdefxz?"),
}


class LexError(DiagnosticError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # kw | id | num | op | str | sysid | directive | eof
    text: str
    loc: Loc
    width: Optional[int] = None
    base: Optional[str] = None  # "b" | "o" | "d" | "h" | None for plain decimal
    digits: Optional[str] = None
    signed: bool = False

    @property
    def value(self) -> Optional[int]:
        """Integer value of a literal, or None when it holds x/z digits."""
        if self.kind != "num":
            return None
        base = self.base or "d"
        if any(c in "xz?" for c in self.digits):
            return None
        return int(self.digits, _BASE_RADIX[base])

    @property
    def base_name(self) -> Optional[str]:
        return _BASE_NAMES.get(self.base) if self.base else None

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.loc.line}:{self.loc.col})"


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Split ``source`` into tokens, dropping whitespace and comments.

    The returned list always ends with an ``eof`` token.
    """
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)

    def loc_at(p: int) -> Loc:
        return Loc(file, line, p - line_start + 1)

    while pos < n:
        ch = source[pos]
        if ch == "\n":
            line += 1
            pos += 1
            line_start = pos
            continue
        if ch in " \t\r\f\v":
            pos += 1
            continue
        if source.startswith("//", pos):
            end = source.find("\n", pos)
            pos = n if end < 0 else end
            continue
        if source.startswith("/*", pos):
            start = loc_at(pos)
            end = source.find("*/", pos + 2)
            if end < 0:
                raise LexError("unterminated block comment", start)
            chunk = source[pos:end + 2]
            newlines = chunk.count("\n")
            if newlines:
                line += newlines
                line_start = pos + chunk.rfind("\n") + 1
            pos = end + 2
            continue

        here = loc_at(pos)
        if ch == '"':
            end = pos + 1
            while end < n and source[end] != '"':
                if source[end] == "\n":
                    break
                end += 2 if source[end] == "\\" else 1
            if end >= n or source[end] != '"':
                raise LexError("unterminated string", here)
            tokens.append(Token("str", source[pos:end + 1], here))
            pos = end + 1
            continue
        if ch == "`":
            m = _DIRECTIVE.match(source, pos)
            if not m:
                raise LexError("illegal character '`'", here)
            eol = source.find("\n", pos)
            eol = n if eol < 0 else eol
            tokens.append(Token("directive", source[pos:eol].rstrip(), here))
            pos = eol
            continue
        if ch == "$":
            m = _SYSIDENT.match(source, pos)
            if not m:
                raise LexError("illegal character '$'", here)
            tokens.append(Token("sysid", m.group(), here))
            pos = m.end()
            continue
        m = _IDENT.match(source, pos)
        if m:
            word = m.group()
            tokens.append(Token("kw" if word in KEYWORDS else "id", word, here))
            pos = m.end()
            continue
        if ch.isdigit() or ch == "'":
            tok, pos = _lex_number(source, pos, here)
            tokens.append(tok)
            continue
        for op in OPERATORS:
            if source.startswith(op, pos):
                tokens.append(Token("op", op, here))
                pos += len(op)
                break
        else:
            raise LexError(f"illegal character {ch!r}", here)

    tokens.append(Token("eof", "", loc_at(pos)))
    return tokens


def _lex_number(source: str, pos: int, here: Loc) -> tuple[Token, int]:
    width: Optional[int] = None
    start = pos
    m = _DECIMAL.match(source, pos)
    if m:
        size_text = m.group()
        pos = m.end()
        # allow "8 'hFF"
        probe = pos
        while probe < len(source) and source[probe] in " \t":
            probe += 1
        if not (probe < len(source) and source[probe] == "'"):
            digits = size_text.replace("_", "")
            return Token("num", size_text, here, digits=digits), pos
        width = int(size_text.replace("_", ""))
        if width == 0:
            raise LexError("literal width must be positive", here)
        pos = probe
    based = _BASED.match(source, pos)
    if not based:
        raise LexError("malformed based literal", here)
    signed = bool(based.group(1))
    base = based.group(2).lower()
    digits = based.group(3).replace("_", "").lower()
    bad = [c for c in digits if c not in _BASE_DIGITS[base]]
    if bad or not digits:
        raise LexError(f"invalid digit {bad[0] if bad else ''!r} in {_BASE_NAMES[base]} literal", here)
    pos = based.end()
    text = source[start:pos]
    return Token("num", text, here, width=width, base=base, digits=digits, signed=signed), pos
