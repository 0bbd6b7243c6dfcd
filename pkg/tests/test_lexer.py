import pytest
from hypothesis import given, strategies as st

from deepsva.verilog import LexError, tokenize


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src)[:-1]]


def test_numbers_and_based_literals():
    toks = tokenize("8'hFF 4'b10_10 'd3 12 3'sb101")
    assert [t.value for t in toks[:-1]] == [255, 10, 3, 12, 5]


def test_comments_are_skipped():
    assert kinds("a // line\n/* block\n */ b") == kinds("a b")


def test_locations_are_one_based():
    toks = tokenize("module m;\n  wire w;\nendmodule", "f.v")
    w = [t for t in toks if t.text == "w"][0]
    assert (w.loc.file, w.loc.line, w.loc.col) == ("f.v", 2, 8)


def test_multichar_operators():
    texts = [t.text for t in tokenize("a <= b === c !== d >>> 1 && e || f")[:-1]]
    assert texts == ["a", "<=", "b", "===", "c", "!==", "d", ">>>", "1", "&&", "e", "||", "f"]


def test_unterminated_comment():
    with pytest.raises(LexError) as exc:
        tokenize("module m;\n/* open")
    assert "unterminated block comment" in str(exc.value)
    assert exc.value.loc.line == 2


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_hex_literals_roundtrip(n):
    tok = tokenize(f"32'h{n:x}")[0]
    assert tok.value == n
