import json
import math
import string

import pytest
from hypothesis import given, settings, strategies as st

from conftest import SHA3_DIR
from deepsva.llm import Gateway, GatewayConfig, Prompt, ReplayStore
from deepsva.llm.gateway import Completion
from deepsva.specgen import (ContextOverflow, FeatureParseError, SpecParseError, compose_feature_prompt,
                             compose_spec_prompt, compute_similarity, estimate_tokens, hygiene_violations,
                             module_body_lines, parse_features, parse_spec_text, similarity_matrix,
                             stability_run)
from deepsva.structure.iotable import IoRow, IoTable

TABLE = IoTable("fifo1", (
    IoRow("clk", "input", 1, ("primary",)), IoRow("reset", "input", 1, ("primary",)),
    IoRow("push", "input", 1, ("primary",)), IoRow("pop", "input", 1, ("primary",)),
    IoRow("din", "input", 8, ("primary",)), IoRow("dout", "output", 8, ("primary",)),
    IoRow("full", "output", 1, ("primary",)), IoRow("empty", "output", 1, ("primary",)),
))


def spec_prompt(s, module, text, **kw):
    return compose_spec_prompt(module, s.db, s.mcg, s.table(module), s.simplified, text, **kw)


# -- prompt composition -------------------------------------------------------

def test_spec_prompt_carries_structure(sha3, sha3_spec_text):
    p = spec_prompt(sha3, "padder", sha3_spec_text)
    assert p.template_id == "module_spec.v1"
    assert "Target module: padder" in p.user
    assert sha3.table("padder").render() in p.user
    assert "Instantiated by: keccak (as instance padder_)" in p.user
    assert "Instantiates: padder1 (instance p0)" in p.user
    assert "- keccak.in -> keccak.padder_.in" in p.user
    assert sha3_spec_text.strip()[:200] in p.user
    assert all(n.startswith("dropped chain") for n in p.notes)


def test_top_and_leaf_context(sha3, sha3_spec_text):
    assert "none (top-level module)" in spec_prompt(sha3, "keccak", sha3_spec_text).user
    assert "none (leaf module)" in spec_prompt(sha3, "rconst", sha3_spec_text).user


def test_empty_design_spec_rejected(sha3):
    with pytest.raises(ValueError):
        spec_prompt(sha3, "padder", "  \n")


def test_budget_drops_longest_chains_first(sha3, sha3_spec_text):
    full = spec_prompt(sha3, "padder", sha3_spec_text)
    budget = estimate_tokens(full.system + full.user) - 200
    p = spec_prompt(sha3, "padder", sha3_spec_text, token_budget=budget)
    assert estimate_tokens(p.system + p.user) <= budget
    assert p.notes and all(n.startswith("dropped chain") for n in p.notes)
    lengths = [int(n.split("(")[1].split()[0]) for n in p.notes]
    assert lengths == sorted(lengths, reverse=True)
    assert sha3_spec_text.strip() in " ".join(p.user.split("<<<\n", 1)[1:]) or sha3_spec_text.strip()[-50:] in p.user


def test_budget_truncates_spec_after_chains(sha3, sha3_spec_text):
    p = spec_prompt(sha3, "padder", sha3_spec_text, token_budget=900)
    assert any(n.startswith("truncated design_spec") for n in p.notes)
    assert "signal chains" in p.user and "\nnone\n" in p.user
    assert estimate_tokens(p.system + p.user) <= 900


def test_budget_overflow(sha3, sha3_spec_text):
    with pytest.raises(ContextOverflow):
        spec_prompt(sha3, "padder", sha3_spec_text, token_budget=50)


def test_hygiene_scan_catches_leak(sha3, sha3_spec_text):
    lines = module_body_lines(sha3.db, "padder", sha3.unit.files)
    assert "assign accept = (~ state) & in_ready & (~ buffer_full);" in lines
    assert hygiene_violations(spec_prompt(sha3, "padder", sha3_spec_text), lines) == []
    leaky = spec_prompt(sha3, "padder", sha3_spec_text + "\n    assign  accept = (~ state) & in_ready & (~ buffer_full);")
    assert hygiene_violations(leaky, lines) == ["assign accept = (~ state) & in_ready & (~ buffer_full);"]


def test_body_lines_skip_comments_and_trivia(sha3):
    lines = module_body_lines(sha3.db, "f_permutation", sha3.unit.files)
    assert "rconst" not in lines and "end" not in lines
    assert all("/*" not in l and "//" not in l for l in lines)


# -- module spec parsing -----------------------------------------------------

LABELED = """Overview:
A one-entry buffer.

Ports:
- clk: clock.
- `push` (input): write request.
| dout | output | 8 | stored byte |

Function:
Holds one byte.
"""


def test_labeled_spec_parse():
    spec = parse_spec_text("fifo1", LABELED, TABLE)
    assert spec.overview == "A one-entry buffer."
    assert spec.function == "Holds one byte."
    assert spec.port("clk") == "clock."
    assert spec.port("push") == "write request."
    assert spec.port("dout") == "stored byte"
    assert spec.port("full") == "unknown"
    assert [n for n, _ in spec.ports] == TABLE.port_names
    assert not spec.degraded_parse


def test_markdown_headings_parse():
    spec = parse_spec_text("fifo1", "## Overview\nx\n## Ports\n- pop: read\n## Functional description\ny", TABLE)
    assert (spec.overview, spec.port("pop"), spec.function) == ("x", "read", "y")


def test_unlabeled_spec_degrades():
    spec = parse_spec_text("fifo1", "It stores a byte.", TABLE)
    assert spec.degraded_parse and spec.function == "It stores a byte."
    assert all(d == "unknown" for _, d in spec.ports)
    prompt = compose_feature_prompt(spec, TABLE)
    assert "It stores a byte." in prompt.user


def test_empty_spec_rejected():
    with pytest.raises(SpecParseError):
        parse_spec_text("fifo1", " \n", TABLE)


def test_spec_json_roundtrip():
    spec = parse_spec_text("fifo1", LABELED, TABLE)
    assert type(spec).from_json(json.loads(json.dumps(spec.to_json()))) == spec


# -- features ----------------------------------------------------------------

def test_plain_item_is_other_category():
    feats, diags = parse_features("1. x", "fifo1", TABLE)
    assert len(feats) == 1 and feats[0].category == "other" and feats[0].signals == ()
    assert feats[0].statement == "x." and feats[0].id == "fifo1.F1" and diags == []


def test_unknown_signal_dropped_with_warning():
    text = "1. `full` rises after `push`.\n2. `foo` is stable.\n3. When `reset` is high, `empty` is set."
    feats, diags = parse_features(text, "fifo1", TABLE)
    assert [f.ordinal for f in feats] == [1, 2]
    assert feats[1].signals == ("reset", "empty") and feats[1].category == "reset"
    assert feats[0].category == "handshake"
    assert len(diags) == 1 and diags[0].severity == "warning" and "foo" in diags[0].message


def test_multi_sentence_dropped():
    feats, diags = parse_features("1. `full` is set. Then `empty` clears.\n2) Data `dout` equals `din`.",
                                  "fifo1", TABLE)
    assert [f.statement for f in feats] == ["Data `dout` equals `din`."]
    assert "not a single sentence" in diags[0].message


def test_hierarchical_and_literal_references():
    feats, _ = parse_features("1. `fifo1.full == 1'b1` implies `u0.empty`.", "fifo1", TABLE)
    assert feats[0].signals == ("full", "empty")


def test_bare_port_words_without_backticks():
    feats, _ = parse_features("1. After pop the fifo is empty.", "fifo1", TABLE)
    assert feats[0].signals == ("pop", "empty")


def test_no_items():
    with pytest.raises(FeatureParseError):
        parse_features("no list here", "fifo1", TABLE)


# -- similarity --------------------------------------------------------------

def test_similarity_hand_value():
    # bags {a:1, b:2} and {a:1, b:1}: 3 / sqrt(5 * 2)
    assert abs(compute_similarity("a b b", "a b") - 3 / math.sqrt(10)) < 1e-12
    assert abs(compute_similarity("a b b", "a b") - 0.9487) < 0.001


def test_similarity_normalizes_case_and_punctuation():
    assert compute_similarity("The FIFO, is full!", "the fifo is full") == 1.0
    assert compute_similarity("", "") == 1.0 and compute_similarity("", "x") == 0.0


words = st.lists(st.sampled_from(["a", "b", "c", "ready", "Valid", "x1", "reset,", "data."]), max_size=12)
texts = words.map(" ".join)


@settings(max_examples=500)
@given(texts, texts)
def test_similarity_axioms(a, b):
    s = compute_similarity(a, b)
    assert 0.0 <= s <= 1.0
    assert s == compute_similarity(b, a)
    assert compute_similarity(a, a) == 1.0


@given(words, words)
def test_disjoint_bags_score_zero(a, b):
    left = " ".join("l" + w.strip(string.punctuation).lower() for w in a)
    right = " ".join("r" + w.strip(string.punctuation).lower() for w in b)
    if left and right:
        assert compute_similarity(left, right) == 0.0


@given(words, st.randoms())
def test_word_order_is_irrelevant(ws, rnd):
    shuffled = list(ws)
    rnd.shuffle(shuffled)
    assert compute_similarity(" ".join(ws), " ".join(shuffled)) == 1.0


def test_similarity_matrix_shape():
    m, mean = similarity_matrix(["a b", "a b b", "c"])
    assert len(m) == 3 and all(len(r) == 3 for r in m)
    assert all(m[i][i] == 1.0 for i in range(3)) and m[0][1] == m[1][0]
    assert mean == pytest.approx((3 / math.sqrt(10)) / 3)


# -- stability ---------------------------------------------------------------

def stability_gateway():
    return Gateway(GatewayConfig(), ReplayStore("replay", SHA3_DIR / "stability.jsonl"))


def test_stability_needs_two_runs(sha3, sha3_spec_text):
    with pytest.raises(ValueError):
        stability_run("padder", spec_prompt(sha3, "padder", sha3_spec_text), 1, stability_gateway())


def test_stability_replay_shape_and_determinism(sha3, sha3_spec_text):
    prompt = spec_prompt(sha3, "padder", sha3_spec_text)
    a = stability_run("padder", prompt, 5, stability_gateway())
    b = stability_run("padder", prompt, 5, stability_gateway())
    assert a.k == 5 and len(a.matrix) == 5 and all(len(r) == 5 for r in a.matrix)
    assert all(a.matrix[i][i] == 1.0 for i in range(5))
    assert all(a.matrix[i][j] == a.matrix[j][i] for i in range(5) for j in range(5))
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)
    assert 0.0 < a.mean <= 1.0 and a.fingerprint == prompt.fingerprint


def test_stability_empty_completion():
    store = ReplayStore("replay")
    p = Prompt("s", "u")
    for run in range(2):
        store.put(p, Completion("text" if run == 0 else "  "), run)
    with pytest.raises(SpecParseError):
        stability_run("m", p, 2, Gateway(GatewayConfig(), store))


FIFO_STUB = """module fifo_stub (input clk, input push, output full);
  reg r;
  assign full = r;
  always @(posedge clk) r <= push;
endmodule
"""

FIFO_SPEC = """Overview:
fifo_stub tracks whether its single slot holds data.

Ports:
- clk: rising-edge clock.
- push: write strobe.
- full: high once a push has been captured.

Function:
full follows push with one cycle of delay.
"""


def test_recorded_stub_replays_to_three_port_spec(tmp_path):
    import httpx
    from deepsva.pipeline import analyze_design
    from deepsva.specgen import generate_module_spec
    from deepsva.structure.chains import ChainLimits

    rtl = tmp_path / "fifo_stub.v"
    rtl.write_text(FIFO_STUB)
    s, diags = analyze_design([str(rtl)], None, ChainLimits())
    assert not [d for d in diags if d.severity == "error"]
    p = spec_prompt(s, "fifo_stub", "A one-slot FIFO stub.")
    store_path = tmp_path / "rec.jsonl"
    reply = {"id": "r1", "model": "m", "choices": [{"message": {"content": FIFO_SPEC}, "finish_reason": "stop"}]}
    client = httpx.Client(transport=httpx.MockTransport(lambda req: httpx.Response(200, json=reply)))
    recorder = Gateway(GatewayConfig(endpoint="http://llm.test/v1"), ReplayStore("record", store_path), "key", client)
    recorded = generate_module_spec(p, recorder, "fifo_stub", s.table("fifo_stub"))

    replayer = Gateway(GatewayConfig(), ReplayStore("replay", store_path))
    spec = generate_module_spec(p, replayer, "fifo_stub", s.table("fifo_stub"))
    assert spec == recorded and replayer.calls == 0
    assert [name for name, _ in spec.ports] == ["clk", "push", "full"]
    assert all(text for _, text in spec.ports)
    assert not spec.degraded_parse and spec.fingerprint == p.fingerprint
