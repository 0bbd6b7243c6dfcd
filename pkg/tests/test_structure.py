"""Call graph, I/O tables, dataflow edge tables and DOT export."""

import json
import re
import time
from pathlib import Path

import pydot
import pytest

from conftest import GRAPHS, POS, SHA3
from deepsva.structure import build_dataflow, build_io_tables, build_mcg, export_dot
from deepsva.structure.iotable import PRIMARY
from deepsva.verilog import elaborate, parse_files, parse_text

EDGE_TABLES = json.loads((GRAPHS / "edges.json").read_text())


def grep_instantiations(paths):
    """(parent, child, instance) triples found by scanning the raw sources."""
    texts = [re.sub(r"//[^\n]*", " ", re.sub(r"/\*.*?\*/", " ", Path(p).read_text(), flags=re.S)) for p in paths]
    defined = {m for t in texts for m in re.findall(r"\bmodule\s+(\w+)", t)}
    found = set()
    for text in texts:
        for name, body in re.findall(r"\bmodule\s+(\w+)(.*?)\bendmodule\b", text, flags=re.S):
            for child, inst in re.findall(r"(?m)^\s*(\w+)\s+(?:#\s*\(.*?\)\s*)?(\w+)\s*\(", body):
                if child in defined:
                    found.add((name, child, inst))
    return found


def test_sha3_mcg_matches_grep_oracle():
    t0 = time.perf_counter()
    db = elaborate(parse_files(SHA3))
    mcg = build_mcg(db)
    elapsed = time.perf_counter() - t0
    got = {(e.parent, e.child, e.instance) for e in mcg.edges}
    assert got == grep_instantiations(SHA3)
    assert len(got) == 5 and mcg.top == "keccak"
    assert elapsed < 5.0


def test_mcg_marks_blackboxes_external():
    mcg = build_mcg(elaborate(parse_files([next(p for p in POS if "blackbox" in p.stem)])))
    assert mcg.is_external("vendor_ram") and not mcg.is_external("uses_blackbox")
    assert [e.child for e in mcg.children("uses_blackbox")] == ["vendor_ram"]


def test_mcg_one_edge_per_instance():
    mcg = build_mcg(elaborate(parse_files([next(p for p in POS if "deep_hier" in p.stem)])))
    assert [(e.parent, e.child, e.instance) for e in mcg.edges] == [
        ("deep_top", "mid", "m_a"), ("deep_top", "mid", "m_b"), ("mid", "leaf", "l0"), ("mid", "leaf", "l1")]


def test_io_table_rows_follow_declaration_order():
    db = elaborate(parse_files([next(p for p in POS if "hier_named" in p.stem)]))
    tables, _ = build_io_tables(db)
    adder = tables["adder"]
    assert adder.port_names == ["x", "y", "s"]
    assert adder.row("s").connections == ("hier_named.r", "hier_named.t")
    assert adder.row("x").connections == ("hier_named.p",)
    assert tables["hier_named"].row("p").connections == (PRIMARY,)
    assert adder.row("s").direction == "output" and adder.row("s").width == 9


def test_io_table_reports_unconnected_and_constant_ports():
    db = elaborate(parse_text("module c(input a, input b, output y); assign y = a & b; endmodule "
                              "module t(input p, output q); c u(.a(p), .b(1'b1), .y()); assign q = p; endmodule"))
    tables, diags = build_io_tables(db)
    text = [d.message for d in diags]
    assert any("unconnected port 'y'" in m for m in text)
    assert any("'b' of instance 't.u' is tied to a constant" in m for m in text)
    assert tables["c"].row("y").connections == ()
    assert "(unconnected)" in tables["c"].render()


@pytest.mark.parametrize("name", sorted(EDGE_TABLES))
def test_dataflow_edge_table(name):
    df = build_dataflow(elaborate(parse_files([GRAPHS / name])))
    want = EDGE_TABLES[name]
    assert len(df.nodes) == want["nodes"] <= 12
    assert sorted(e.key for e in df.edges) == sorted(map(tuple, want["edges"]))


def all_designs():
    out = [[p] for p in POS] + [[GRAPHS / n] for n in EDGE_TABLES] + [SHA3]
    return out


@pytest.mark.parametrize("paths", all_designs(), ids=lambda ps: Path(ps[0]).stem)
def test_port_edges_respect_direction(paths):
    db = elaborate(parse_files(paths))
    nodes = {n.path: n for n in db.instances()}
    df = build_dataflow(db)
    for e in (e for e in df.edges if e.kind == "port"):
        src_path, src_sig = e.source.rsplit(".", 1)
        dst_path, dst_sig = e.sink.rsplit(".", 1)
        if dst_path in nodes and nodes[dst_path].parent_path == src_path:
            # parent -> child: the child formal reads
            assert nodes[dst_path].signals[dst_sig].kind in ("input", "inout"), e
        else:
            assert nodes[src_path].parent_path == dst_path, e
            assert nodes[src_path].signals[src_sig].kind in ("output", "inout"), e


def test_sequential_flag_and_control_edges():
    df = build_dataflow(elaborate(parse_files([GRAPHS / "g2_seq_control.v"])))
    assert all(e.sequential for e in df.edges)
    ctrl = [e for e in df.edges if e.kind == "control"]
    assert {e.via for e in ctrl} == {"nonblocking"}


def test_combinational_loop_is_reported():
    db = elaborate(parse_text("module m(input a, output y); wire p, q; assign p = q & a; assign q = p; "
                              "assign y = q; endmodule"))
    df = build_dataflow(db)
    assert any("combinational loop through m.p, m.q" in d.message for d in df.diagnostics)


def test_sha3_has_no_combinational_loop():
    df = build_dataflow(elaborate(parse_files(SHA3)))
    assert not [d for d in df.diagnostics if "loop" in d.message]


@pytest.mark.parametrize("which", ["mcg", "dataflow"])
def test_dot_export_parses(which):
    db = elaborate(parse_files(SHA3))
    graph = build_mcg(db) if which == "mcg" else build_dataflow(db)
    parsed = pydot.graph_from_dot_data(export_dot(graph))
    assert parsed and len(parsed) == 1
    g = parsed[0]
    assert len(g.get_edges()) == len(graph.edges)
    names = {n.get_name().strip('"') for n in g.get_nodes()} - {"node"}
    want = set(graph.node_names) if which == "mcg" else set(graph.nodes)
    assert names == want
