"""extract_signal_chains against exhaustive simple-path enumeration."""

import json
from collections import Counter

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from conftest import GRAPHS, SHA3
from deepsva.structure import (ChainLimits, DataflowEdge, DataflowGraph, build_dataflow,
                               extract_signal_chains, simplify_chains)
from deepsva.verilog import elaborate, parse_files

GRAPH_FILES = sorted(json.loads((GRAPHS / "edges.json").read_text()))


def oracle_chains(df: DataflowGraph, include_control: bool = True) -> Counter:
    """Maximal simple paths into each output: every predecessor of the head lies on the path."""
    g = nx.DiGraph()
    g.add_nodes_from(df.nodes)
    g.add_edges_from((e.source, e.sink) for e in df.edges if include_control or e.kind != "control")
    out = Counter()
    for sink in df.outputs:
        if not list(g.predecessors(sink)):
            out[(sink,)] += 1
            continue
        for head in g.nodes:
            if head == sink:
                continue
            for path in nx.all_simple_paths(g, head, sink):
                if set(g.predecessors(head)) <= set(path):
                    out[tuple(path)] += 1
    return out


def tool_chains(df, limits=ChainLimits(max_chains=10_000, max_length=1_000)):
    cs = extract_signal_chains(df, limits)
    return Counter(c.signals for c in cs.chains), cs


def assert_port_only_subsequence(full, simplified, ports):
    projections = {tuple(s for s in c.signals if s in ports) for c in full}
    for chain in simplified:
        assert all(s in ports for s in chain.signals)
        assert chain.signals in projections
    assert len({c.signals for c in simplified}) == len(simplified)
    assert {c.signals for c in simplified} == projections - {()}


def graph(name):
    return build_dataflow(elaborate(parse_files([GRAPHS / name])))


@pytest.mark.parametrize("name", GRAPH_FILES)
@pytest.mark.parametrize("control", [True, False])
def test_fixture_chains_equal_oracle(name, control):
    df = graph(name)
    assert len(df.nodes) <= 12
    got, cs = tool_chains(df, ChainLimits(10_000, 1_000, control))
    assert got == oracle_chains(df, control)
    assert not cs.truncated
    assert_port_only_subsequence(cs.chains, simplify_chains(cs.chains, df.ports), df.ports)


def test_feedback_cut_at_path_revisit():
    got, _ = tool_chains(graph("g5_feedback.v"))
    assert set(got) == {("g5.inc", "g5.nxt", "g5.r", "g5.cnt")}


def test_hier_chain_crosses_ports():
    got, cs = tool_chains(graph("g3_hier.v"))
    full = ("g3.x", "g3.u0.i", "g3.u0.o", "g3.m", "g3.u1.i", "g3.u1.o", "g3.y")
    assert full in got
    simple = simplify_chains(cs.chains, graph("g3_hier.v").ports)
    assert ("g3.x", "g3.u0.i", "g3.u0.o", "g3.u1.i", "g3.u1.o", "g3.y") in {c.signals for c in simple}


def test_limits_mark_truncation():
    df = graph("g6_sub_outputs.v")
    cs = extract_signal_chains(df, ChainLimits(max_chains=1))
    assert "g6.r" in cs.truncated
    assert sum(1 for c in cs.chains if c.sink == "g6.r") == 1
    short = extract_signal_chains(df, ChainLimits(max_length=2))
    assert all(len(c) <= 2 for c in short.chains) and "g6.r" in short.truncated


def test_sha3_simplified_chains_are_port_projections():
    df = build_dataflow(elaborate(parse_files(SHA3)))
    cs = extract_signal_chains(df)
    assert_port_only_subsequence(cs.chains, simplify_chains(cs.chains, df.ports), df.ports)
    assert all(len(set(c.signals)) == len(c.signals) for c in cs.chains)


# -- random graphs ----------------------------------------------------------

@st.composite
def random_graphs(draw):
    n = draw(st.integers(1, 8))
    nodes = [f"t.n{i}" for i in range(n)]
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=18))
    kinds = draw(st.lists(st.sampled_from(["continuous", "blocking", "nonblocking", "control"]),
                          min_size=len(pairs), max_size=len(pairs)))
    edges = {}
    for (a, b), k in zip(pairs, kinds):
        if a != b:
            e = DataflowEdge(nodes[a], nodes[b], k)
            edges[e.key] = e
    outputs = draw(st.sets(st.sampled_from(nodes), min_size=1))
    ports = draw(st.sets(st.sampled_from(nodes))) | outputs
    return DataflowGraph(tuple(nodes), tuple(sorted(edges.values(), key=lambda e: e.key)),
                         frozenset(ports), tuple(sorted(outputs)))


@settings(max_examples=300, deadline=None)
@given(random_graphs(), st.booleans())
def test_random_graph_chains_equal_oracle(df, control):
    got, cs = tool_chains(df, ChainLimits(10_000, 1_000, control))
    assert got == oracle_chains(df, control)
    assert_port_only_subsequence(cs.chains, simplify_chains(cs.chains, df.ports), df.ports)


@settings(max_examples=100, deadline=None)
@given(random_graphs())
def test_extraction_is_deterministic(df):
    a = extract_signal_chains(df)
    b = extract_signal_chains(df)
    assert a.chains == b.chains
