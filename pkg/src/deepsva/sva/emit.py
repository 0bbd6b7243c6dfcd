"""Writing resolved assertions to a .sva file, with a report and a rejects sidecar."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .. import SCHEMA_VERSION, __version__
from .assertion import RESOLVED, STATUS_RANK, DeepAssertion


@dataclass(frozen=True)
class ValidationReport:
    n: int  # mined
    s: int  # syntax-correct
    resolved: int
    deduplicated: int  # resolved assertions dropped as textual duplicates
    emitted: int
    verdicts: tuple  # DeepAssertion, input order

    def __post_init__(self):
        assert self.resolved <= self.s <= self.n == len(self.verdicts)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "validation_report",
            "N": self.n,
            "S": self.s,
            "resolved": self.resolved,
            "deduplicated": self.deduplicated,
            "emitted": self.emitted,
            "verdicts": [a.to_json() for a in self.verdicts],
        }

    def render(self) -> str:
        lines = ["| N | S | resolved | emitted | duplicates |", "|---|---|---|---|---|",
                 f"| {self.n} | {self.s} | {self.resolved} | {self.emitted} | {self.deduplicated} |"]
        return "\n".join(lines)


def summarize(assertions: Sequence[DeepAssertion]) -> tuple[int, int, int]:
    n = len(assertions)
    s = sum(1 for a in assertions if STATUS_RANK[a.status] >= 1)
    r = sum(1 for a in assertions if a.status == RESOLVED)
    return n, s, r


def _feature_key(feature) -> tuple:
    if feature is None:
        return (1, 0, "")
    m = re.search(r"(\d+)$", feature)
    return (0, int(m.group(1)) if m else 0, feature)


def ordered(assertions: Iterable[DeepAssertion]) -> list[DeepAssertion]:
    """Stable order by module, then feature ordinal."""
    return sorted(assertions, key=lambda a: (a.module, _feature_key(a.feature)))


HEADER = """\
// Deep assertions emitted by deepsva {version}
// Signals are written module.port; the instance each resolves to is noted
// per assertion. To check them, place this file inside a checker module and
// bind it into the design, for example:
//   bind {top} deepsva_checker u_deepsva_checker (.*);
"""


def emit_sva(assertions: Sequence[DeepAssertion], path: str | Path, top: str = "<top>") -> ValidationReport:
    """Write resolved assertions to ``path`` and rejected ones to ``<stem>.rejected.txt``."""
    path = Path(path)
    n, s, r = summarize(assertions)
    seen: set[str] = set()
    keep: list[DeepAssertion] = []
    dups = 0
    for a in ordered(x for x in assertions if x.status == RESOLVED):
        if a.text in seen:
            dups += 1
            continue
        seen.add(a.text)
        keep.append(a)

    out = [HEADER.format(version=__version__, top=top).rstrip("\n")]
    for a in keep:
        out.append("")
        if a.instances:
            out.append(f"// instances: {', '.join(a.instances)}")
        out.append(f"// source: {a.feature or a.loc}")
        out.append(a.text)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no survivors: leave the file empty rather than header-only
    path.write_text("\n".join(out) + "\n" if keep else "", encoding="utf-8", newline="\n")

    rejected = []
    for a in ordered(x for x in assertions if x.status != RESOLVED):
        rejected.append(f"# status: {a.status}; source: {a.feature or a.loc}")
        rejected.extend(f"# {d}" for d in a.diagnostics)
        rejected.append(a.raw.strip())
        rejected.append("")
    sidecar_path(path).write_text("\n".join(rejected), encoding="utf-8", newline="\n")
    return ValidationReport(n, s, r, dups, len(keep), tuple(assertions))


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".rejected.txt")
