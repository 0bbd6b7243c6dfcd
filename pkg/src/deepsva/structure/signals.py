"""Helpers for hierarchical signal references (``instance.path.signal``)."""

from __future__ import annotations

from typing import Iterator, Optional

from ..verilog import ast as A
from ..verilog.printer import print_expr


def ref(path: str, signal: str) -> str:
    return f"{path}.{signal}"


def split_ref(r: str) -> tuple[str, str]:
    path, _, signal = r.rpartition(".")
    return path, signal


def signal_reads(e: Optional[A.Expr]) -> Iterator[tuple[str, Optional[str]]]:
    """(signal name, select text or None) for every identifier read by ``e``.

    Index expressions inside selects are reads too.
    """
    if e is None:
        return
    if isinstance(e, (A.BitSelect, A.PartSelect)):
        base = A.base_ident(e)
        if base is not None:
            yield base.name, print_expr(e)[len(base.name):]
        for idx in _indices(e):
            yield from signal_reads(idx)
        if base is None:
            yield from signal_reads(e.base)
        return
    if isinstance(e, A.Ident):
        yield e.name, None
        return
    if isinstance(e, A.Unary):
        yield from signal_reads(e.operand)
    elif isinstance(e, A.Binary):
        yield from signal_reads(e.left)
        yield from signal_reads(e.right)
    elif isinstance(e, A.Ternary):
        yield from signal_reads(e.cond)
        yield from signal_reads(e.if_true)
        yield from signal_reads(e.if_false)
    elif isinstance(e, A.Concat):
        for item in e.items:
            yield from signal_reads(item)
    elif isinstance(e, A.Repl):
        yield from signal_reads(e.count)
        for item in e.items:
            yield from signal_reads(item)


def _indices(e: A.Expr) -> list[A.Expr]:
    out = []
    while isinstance(e, (A.BitSelect, A.PartSelect)):
        if isinstance(e, A.BitSelect):
            out.append(e.index)
        else:
            out.extend([e.left, e.right])
        e = e.base
    return out


def signal_writes(e: Optional[A.Expr]) -> list[tuple[str, Optional[str]]]:
    if e is None:
        return []
    return [(ident.name, None if sel is None else print_expr(sel)[len(ident.name):])
            for ident, sel in A.lvalue_targets(e)]
