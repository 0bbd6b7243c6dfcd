"""Structural extraction from an elaborated design."""

from .chains import ChainLimits, ChainSet, SignalChain, extract_signal_chains, simplify_chains
from .dataflow import DataflowEdge, DataflowGraph, build_dataflow
from .dot import export_dot
from .iotable import IoRow, IoTable, build_io_tables
from .mcg import MCGEdge, ModuleCallGraph, build_mcg

__all__ = [
    "ChainLimits", "ChainSet", "DataflowEdge", "DataflowGraph", "IoRow", "IoTable", "MCGEdge",
    "ModuleCallGraph", "SignalChain", "build_dataflow", "build_io_tables", "build_mcg",
    "export_dot", "extract_signal_chains", "simplify_chains",
]
