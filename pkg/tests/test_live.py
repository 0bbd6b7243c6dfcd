"""Live endpoint smoke test; runs only with DEEPSVA_API_KEY set."""

import os

import pytest

from deepsva.llm import Gateway, GatewayConfig, Prompt, ReplayStore

pytestmark = [pytest.mark.live,
              pytest.mark.skipif(not os.environ.get("DEEPSVA_API_KEY"), reason="DEEPSVA_API_KEY not set")]


def test_live_completion_roundtrip(tmp_path):
    cfg = GatewayConfig(endpoint=os.environ.get("DEEPSVA_ENDPOINT", GatewayConfig.endpoint),
                        model=os.environ.get("DEEPSVA_MODEL", GatewayConfig.model))
    gw = Gateway(cfg, ReplayStore("record", tmp_path / "rec.jsonl"))
    p = Prompt("Answer with one word.", "Name the SystemVerilog implication operator's keyword family.", 0.0, 16)
    assert gw.complete(p).text.strip()
    assert (tmp_path / "rec.jsonl").read_text().count("\n") == 1
