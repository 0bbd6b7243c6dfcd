"""Mined assertions and their syntax check."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

from ..diagnostics import Diagnostic, Loc, warning
from .grammar import Assertion, SvaSyntaxError, parse_assertion, print_assertion

RAW, SYNTAX_OK, RESOLVED = "raw", "syntax_ok", "resolved"
STATUS_RANK = {RAW: 0, SYNTAX_OK: 1, RESOLVED: 2}


@dataclass(frozen=True)
class DeepAssertion:
    raw: str
    module: str = ""  # target module the assertion was mined for
    feature: Optional[str] = None  # source feature id
    status: str = RAW
    tree: Optional[Assertion] = None
    diagnostics: tuple = ()
    loc: Loc = Loc("<assertion>", 1, 1)  # where the raw text starts
    instances: tuple = ()  # resolved instance paths, one per signal reference

    @property
    def text(self) -> str:
        """Canonical printed form when parsed, otherwise the raw text on one line."""
        return print_assertion(self.tree) if self.tree is not None else " ".join(self.raw.split())

    def with_diag(self, d: Diagnostic) -> "DeepAssertion":
        return replace(self, diagnostics=self.diagnostics + (d,))

    def to_json(self) -> dict:
        return {
            "module": self.module,
            "feature": self.feature,
            "status": self.status,
            "raw": self.raw,
            "text": self.text,
            "instances": list(self.instances),
            "diagnostics": [d.to_json() for d in self.diagnostics],
        }


def validate_syntax(a: DeepAssertion) -> DeepAssertion:
    """Check the raw text against the template grammar; failure is a verdict."""
    if a.status != RAW:
        return a
    flat = " ".join(a.raw.split())
    try:
        tree = parse_assertion(flat)
    except SvaSyntaxError as exc:
        # column is relative to the whitespace-normalized statement
        return a.with_diag(warning(exc.message, Loc(a.loc.file, a.loc.line, exc.col)))
    return replace(a, tree=tree, status=SYNTAX_OK)


_FEATURE_TAG = re.compile(r"//\s*(?:feature|source)\s*:?\s*#?\s*(\S+)", re.IGNORECASE)


def split_statements(text: str, file: str = "", start_line: int = 1) -> list[tuple[str, Optional[str], Loc]]:
    """Split text into ``);``-terminated statements with the tag comment preceding each.

    Returns (statement, tag, loc) triples; the tag is the argument of the most
    recent ``// feature N`` or ``// source: X`` comment. Trailing text without
    a terminator becomes a final statement of its own.
    """
    out = []
    tag: Optional[str] = None
    buf: list[str] = []
    buf_loc: Optional[Loc] = None
    for n, line in enumerate(text.splitlines(), start_line):
        code, _, comment = line.partition("//")
        if comment:
            m = _FEATURE_TAG.match("//" + comment)
            if m:
                tag = m.group(1).rstrip(".:,")
        rest = code
        while rest.strip():
            if buf_loc is None:
                col = len(rest) - len(rest.lstrip()) + 1 + (len(code) - len(rest))
                buf_loc = Loc(file, n, col)
            idx = rest.find(");")
            if idx < 0:
                buf.append(rest.strip())
                break
            buf.append(rest[:idx + 2].strip())
            out.append((" ".join(buf), tag, buf_loc))
            buf, buf_loc = [], None
            rest = rest[idx + 2:]
    if buf:
        out.append((" ".join(buf), tag, buf_loc))
    return out
