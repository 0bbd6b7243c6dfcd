"""Signal-chain extraction by backward traversal, and port-only simplification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .. import SCHEMA_VERSION
from .dataflow import DataflowGraph

DEFAULT_MAX_CHAINS = 64
DEFAULT_MAX_LENGTH = 64


@dataclass(frozen=True)
class ChainLimits:
    max_chains: int = DEFAULT_MAX_CHAINS  # per output
    max_length: int = DEFAULT_MAX_LENGTH
    include_control: bool = True

    def __post_init__(self):
        if self.max_chains < 1 or self.max_length < 1:
            raise ValueError("chain limits must be >= 1")


@dataclass(frozen=True)
class SignalChain:
    signals: tuple  # source -> sink
    kind: str = "full"  # full | simplified

    @property
    def source(self) -> str:
        return self.signals[0]

    @property
    def sink(self) -> str:
        return self.signals[-1]

    def __iter__(self) -> Iterator[str]:
        return iter(self.signals)

    def __len__(self) -> int:
        return len(self.signals)

    def render(self) -> str:
        return " -> ".join(self.signals)


@dataclass(frozen=True)
class ChainSet:
    chains: tuple
    truncated: frozenset = frozenset()  # outputs whose enumeration hit a limit
    limits: ChainLimits = field(default_factory=ChainLimits)

    def __iter__(self) -> Iterator[SignalChain]:
        return iter(self.chains)

    def __len__(self) -> int:
        return len(self.chains)


def extract_signal_chains(g: DataflowGraph, limits: ChainLimits = ChainLimits(),
                          sinks: Iterable[str] | None = None) -> ChainSet:
    """Enumerate source-to-sink chains ending at every output port.

    Starting from each sink the traversal walks predecessor edges depth-first
    (predecessors in lexicographic order), never revisiting a signal already
    on the current path. A chain is recorded once its head has no
    predecessor left to visit: either it has no incoming edges at all, or
    every predecessor already lies on the path (a cut cycle).
    """
    chains: list[SignalChain] = []
    truncated: set[str] = set()
    for sink in sorted(g.outputs if sinks is None else sinks):
        found, cut = _walk(g, sink, limits)
        chains.extend(SignalChain(tuple(reversed(path)), "full") for path in found)
        if cut:
            truncated.add(sink)
    return ChainSet(tuple(chains), frozenset(truncated), limits)


def _walk(g: DataflowGraph, sink: str, limits: ChainLimits) -> tuple[list[list[str]], bool]:
    found: list[list[str]] = []
    cut = False
    path = [sink]
    on_path = {sink}
    # explicit stack of predecessor iterators keeps deep designs off the recursion limit
    stack = [iter(_open_preds(g, sink, on_path, limits))]
    if not _has_open(g, sink, on_path, limits):
        return [[sink]], False
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            continue
        if len(path) >= limits.max_length:
            cut = True
            continue
        path.append(nxt)
        on_path.add(nxt)
        if _has_open(g, nxt, on_path, limits):
            stack.append(iter(_open_preds(g, nxt, on_path, limits)))
        else:
            if len(found) >= limits.max_chains:
                return found, True
            found.append(list(path))
            path.pop()
            on_path.discard(nxt)
    return found, cut


def _open_preds(g, node, on_path, limits) -> list[str]:
    return [p for p in g.predecessors(node, limits.include_control) if p not in on_path]


def _has_open(g, node, on_path, limits) -> bool:
    return any(p not in on_path for p in g.predecessors(node, limits.include_control))


def simplify_chains(chains: Iterable[SignalChain], ports: Iterable[str]) -> list[SignalChain]:
    """Keep only port signals of each chain; drop empties and duplicates.

    ``ports`` is the set of hierarchical refs that are ports of their
    instance (``DataflowGraph.ports``), which covers top-level ports too.
    """
    port_set = frozenset(ports)
    out: dict[tuple, SignalChain] = {}
    for chain in chains:
        kept = tuple(s for s in chain.signals if s in port_set)
        if kept and kept not in out:
            out[kept] = SignalChain(kept, "simplified")
    return list(out.values())


def chains_to_json(full: ChainSet, simplified: list[SignalChain]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "signal_chains",
        "limits": {
            "max_chains_per_output": full.limits.max_chains,
            "max_chain_length": full.limits.max_length,
            "include_control": full.limits.include_control,
        },
        "truncated_outputs": sorted(full.truncated),
        "full": [list(c.signals) for c in full.chains],
        "simplified": [list(c.signals) for c in simplified],
    }
