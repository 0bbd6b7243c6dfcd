import time

import pytest
from hypothesis import given, settings, strategies as st

from conftest import NEG, POS, expected_message
from deepsva.diagnostics import DiagnosticError
from deepsva.verilog import ast as A
from deepsva.verilog import elaborate, parse_files, parse_text, print_source
from deepsva.verilog.parser import BINARY_PRECEDENCE, UNARY_OPS
from deepsva.verilog.printer import print_expr


def test_corpus_sizes():
    assert len(POS) >= 15
    assert len(NEG) >= 8


@pytest.mark.parametrize("path", POS, ids=lambda p: p.stem)
def test_positive_fixture_elaborates_cleanly(path):
    db = elaborate(parse_files([path]))
    assert [d for d in db.diagnostics if d.severity == "error"] == []


@pytest.mark.parametrize("path", NEG, ids=lambda p: p.stem)
def test_negative_fixture_reports_documented_message(path):
    want = expected_message(path)
    try:
        db = elaborate(parse_files([path]))
        messages = [str(d) for d in db.diagnostics if d.severity == "error"]
    except DiagnosticError as exc:
        messages = [str(exc)]
        assert exc.loc.file == str(path) and exc.loc.line >= 1
    assert any(want in m for m in messages), messages


@pytest.mark.parametrize("path", POS, ids=lambda p: p.stem)
def test_print_parse_roundtrip(path):
    unit = parse_files([path])
    again = parse_text(print_source(unit), "printed.v")
    assert again.modules == unit.modules
    # printing is a fixpoint after one pass
    assert print_source(again) == print_source(unit)


def test_corpus_runtime_under_one_second():
    t0 = time.perf_counter()
    for p in POS + NEG:
        try:
            elaborate(parse_files([p]))
        except DiagnosticError:
            pass
    assert time.perf_counter() - t0 < 1.0


def test_non_ansi_and_ansi_give_same_ports():
    ansi = parse_text("module m(input [3:0] a, output reg y); endmodule").modules[0]
    old = parse_text("module m(a, y); input [3:0] a; output y; reg y; endmodule").modules[0]
    assert [p.name for p in ansi.ports] == [p.name for p in old.ports] == ["a", "y"]
    assert [p.direction for p in ansi.ports] == [p.direction for p in old.ports]


def test_error_carries_location():
    with pytest.raises(DiagnosticError) as exc:
        parse_text("module m(input a);\n  assign = a;\nendmodule", "x.v")
    assert (exc.value.loc.file, exc.value.loc.line) == ("x.v", 2)


def test_unsupported_construct_names_keyword():
    with pytest.raises(DiagnosticError, match="unsupported construct: function"):
        parse_text("module m; function f; endfunction endmodule")


# -- expression round-trip over random trees ---------------------------------

names = st.sampled_from(["a", "b", "c_1", "data", "q"])
numbers = st.builds(lambda w, v: A.Number(w, "h", format(v % (1 << w), "x")),
                    st.integers(1, 16), st.integers(0, 2**16)) | st.builds(lambda v: A.Number(None, None, str(v)),
                                                                             st.integers(0, 999))
leaves = st.builds(A.Ident, names) | numbers


def extend(children):
    return (
        st.builds(A.Unary, st.sampled_from(sorted(UNARY_OPS)), children)
        | st.builds(A.Binary, st.sampled_from(sorted(BINARY_PRECEDENCE)), children, children)
        | st.builds(A.Ternary, children, children, children)
        | st.builds(lambda xs: A.Concat(tuple(xs)), st.lists(children, min_size=1, max_size=3))
        | st.builds(lambda n, xs: A.Repl(A.Number(None, None, str(n)), tuple(xs)),
                    st.integers(1, 4), st.lists(children, min_size=1, max_size=2))
        | st.builds(A.BitSelect, st.builds(A.Ident, names), children)
    )


exprs = st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=300)
@given(exprs)
def test_expression_print_parse_roundtrip(e):
    src = f"module m; wire w; assign w = {print_expr(e)}; endmodule"
    item = [i for i in parse_text(src).modules[0].items if isinstance(i, A.ContinuousAssign)][0]
    assert item.rhs == e
