import pytest

from conftest import POS
from deepsva.verilog import ElabError, elaborate, parse_files, parse_text


def elab(src, top=None):
    return elaborate(parse_text(src, "t.v"), top)


def pos(name):
    return next(p for p in POS if p.stem.startswith(name))


def test_parameter_overrides_reach_widths():
    db = elaborate(parse_files([pos("p04")]))
    wide = db.instance("hier_named.u_wide")
    narrow = db.instance("hier_named.u_narrow")
    assert wide.params["W"] == 8 and narrow.params["W"] == 4
    assert wide.signals["s"].width == 9 and narrow.signals["s"].width == 5


def test_localparam_and_body_parameter():
    db = elaborate(parse_files([pos("p03")]))
    env = db.root.params
    assert env["TOTAL"] == 32 and env["SHIFT"] == 2
    assert db.root.signals["wide"].width == 32


def test_instance_tree_preorder_and_paths():
    db = elaborate(parse_files([pos("p15")]))
    paths = [n.path for n in db.instances()]
    assert paths == ["deep_top", "deep_top.m_a", "deep_top.m_a.l0", "deep_top.m_a.l1",
                     "deep_top.m_b", "deep_top.m_b.l0", "deep_top.m_b.l1"]
    assert [n.path for n in db.instances_of("leaf")] == paths[2:4] + paths[5:]
    assert db.reachable_modules == ["deep_top", "leaf", "mid"]


def test_positional_binding_follows_port_order():
    db = elaborate(parse_files([pos("p05")]))
    m0 = db.instance("hier_positional.m0")
    assert [f for f, _ in m0.connections] == ["a", "b", "sel", "y"]


def test_blackbox_is_recorded_with_warning():
    db = elaborate(parse_files([pos("p13")]))
    assert db.blackboxes == {"vendor_ram"}
    assert db.instance("uses_blackbox.u_ram").blackbox
    assert any("treated as blackbox" in d.message and d.severity == "warning" for d in db.diagnostics)


def test_auto_top_is_logged():
    db = elab("module a(input x); endmodule module b(input y); a u(.x(y)); endmodule")
    assert db.top == "b"
    assert any("selected automatically" in d.message for d in db.diagnostics)


def test_ambiguous_top_requires_flag():
    src = "module a(input x); endmodule module b(input y); endmodule"
    with pytest.raises(ElabError, match="ambiguous top"):
        elab(src)
    assert elab(src, "a").top == "a"


def test_unknown_top():
    with pytest.raises(ElabError, match="unknown top module 'zz'"):
        elab("module a; endmodule", "zz")


def test_mutual_recursion():
    with pytest.raises(ElabError, match="recursive instantiation"):
        elab("module a; b u(); endmodule module b; a v(); endmodule module t; a w(); endmodule", "t")


def test_unconnected_named_port_is_none():
    db = elab("module c(input a, output y); assign y = a; endmodule "
              "module t(input p); c u(.a(p), .y()); endmodule")
    assert dict(db.instance("t.u").connections)["y"] is None


def test_non_constant_range():
    with pytest.raises(ElabError, match="not constant"):
        elab("module m(input [w:0] a); wire w; endmodule")
