"""Source locations and diagnostics shared by every stage."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


@dataclass(frozen=True, order=True)
class Loc:
    file: str = "<input>"
    line: int = 1
    col: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


NOWHERE = Loc("<none>", 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning" | "info"
    message: str
    loc: Loc = field(default=NOWHERE)

    def __str__(self) -> str:
        return f"{self.loc}: {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "message": self.message,
            "file": self.loc.file,
            "line": self.loc.line,
            "col": self.loc.col,
        }


def error(message: str, loc: Loc = NOWHERE) -> Diagnostic:
    return Diagnostic("error", message, loc)


def warning(message: str, loc: Loc = NOWHERE) -> Diagnostic:
    return Diagnostic("warning", message, loc)


def info(message: str, loc: Loc = NOWHERE) -> Diagnostic:
    return Diagnostic("info", message, loc)


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diags)


class DiagnosticError(Exception):
    """Base for errors that carry a located diagnostic."""

    def __init__(self, message: str, loc: Loc = NOWHERE):
        self.diagnostic = error(message, loc)
        super().__init__(str(self.diagnostic))

    @property
    def loc(self) -> Loc:
        return self.diagnostic.loc
