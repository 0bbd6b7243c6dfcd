"""Record the replay fixtures shipped with the tests.

The completions below are hand-written (no model was queried). They are fed
through the real gateway in ``record`` mode by an in-process HTTP responder,
so the stored fingerprints are exactly the ones the pipeline computes.

    python scripts/author_fixtures.py

Rerun after changing a prompt template or anything that feeds a prompt.
"""

from __future__ import annotations

import json
import re
import shutil
import tempfile
from collections import defaultdict
from pathlib import Path

import httpx

from deepsva.config import PipelineConfig
from deepsva.llm.gateway import Gateway, GatewayConfig, ReplayStore
from deepsva.pipeline import run_pipeline

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "tests" / "fixtures"

SPECS = {
    "fifo1": """Overview:
fifo1 is a one-entry buffer between a producer and a consumer. It stores at
most one byte and reports its occupancy through two complementary flags.

Ports:
- clk: clock; all state changes on its rising edge.
- reset: synchronous active-high reset that empties the buffer.
- push: write request from the producer, honored only while the buffer is empty.
- pop: read request from the consumer, honored only while the buffer holds a byte.
- din: byte written when a push is honored.
- dout: the stored byte; holds its value until the next honored push.
- full: high exactly when a byte is stored.
- empty: complement of full.

Function:
A push on an empty buffer stores din and sets full on the next cycle. A pop
on a full buffer clears full on the next cycle. Pushes on a full buffer and
pops on an empty buffer have no effect. full and empty are never equal.
""",
    "keccak": """Overview:
keccak is the top level of the SHA3-512 core. It buffers and pads the
incoming message through its padder instance, runs the Keccak-f[1600]
permutation through its f_permutation instance and presents the 512-bit
digest to the user.

Ports:
- clk: system clock.
- reset: synchronous active-high reset.
- in: 32-bit message word, most significant byte first.
- in_ready: in holds a valid word this cycle.
- is_last: the current word is the last word of the message.
- byte_num: number of valid bytes in the last word.
- buffer_full: the core cannot take a word this cycle.
- out: 512-bit digest, byte-reordered from the permutation state.
- out_ready: out holds the final digest; stays high until reset.

Function:
The module forwards user words to the padder, hands complete 576-bit blocks
to the permutation, waits for the last block to be permuted and then raises
out_ready with the digest on out.
""",
    "padder": """Overview:
padder collects 32-bit message words into a 576-bit block, applies the
SHA3 padding after the last word and offers each full block to the
permutation.

Ports:
- clk: clock input.
- reset: synchronous reset; clears the block buffer and the fill level.
- in: message word from the user.
- in_ready: in is valid this cycle.
- is_last: the word on in is the last word of the message.
- byte_num: valid bytes in the last word, used to place the padding byte.
- buffer_full: the block buffer is full; user words are not accepted.
- out: the 576-bit block handed to f_permutation.
- out_ready: a complete block is available on out; equal to buffer_full.
- f_ack: f_permutation has taken the block; the buffer empties.

Function:
While not full, padder shifts each accepted word into its block buffer. A
word is accepted only when in_ready is high and buffer_full is low. After
is_last it inserts the padding word produced by padder1 and fills the rest
of the block with zeros, setting the final padding bit. When the buffer is
full it raises out_ready and waits for f_ack, which empties the buffer.
After reset out_ready and buffer_full are low.
""",
    "padder1": """Overview:
padder1 is a combinational helper that builds the padded form of the last
message word.

Ports:
- in: the last message word.
- byte_num: how many bytes of in are message bytes (0 to 3).
- out: in with the padding byte 0x01 placed right after the valid bytes.

Function:
For byte_num = 0 the output is the padding byte followed by zeros; for
byte_num = 1, 2 or 3 the leading byte_num bytes of in are kept and the
padding byte follows them, with zeros after it.
""",
    "f_permutation": """Overview:
f_permutation absorbs a 576-bit block into the 1600-bit Keccak state and
runs the 24 rounds of Keccak-f[1600], one per clock cycle.

Ports:
- clk: clock input.
- reset: synchronous reset; clears the state and out_ready.
- in: the block to absorb.
- in_ready: a block is available on in.
- ack: the block on in is taken this cycle.
- out: the 1600-bit permutation state.
- out_ready: the permutation of the last taken block is complete.

Function:
When in_ready is high and no permutation is running, the block is XORed
into the state, ack is raised for one cycle and the rounds start. Each
cycle one round is applied using the round constant for the current round.
After the 24th round out_ready is raised. A new block clears out_ready.
""",
    "rconst": """Overview:
rconst produces the 64-bit Keccak round constant for the current round.

Ports:
- i: one-hot round selector, bit k set during round k.
- rc: the round constant for the selected round.

Function:
rc is a pure function of i: each of the bits 0, 1, 3, 7, 15, 31 and 63 of
rc is the OR of the selector bits of the rounds whose constant has that bit
set. All other bits of rc are zero.
""",
    "round": """Overview:
round is the combinational Keccak-f[1600] round function.

Ports:
- in: the 1600-bit state before the round.
- round_const: the 64-bit round constant.
- out: the state after theta, rho, pi, chi and iota.

Function:
out is computed from in without storage. Only the iota step depends on
round_const, which is XORed into lane (0, 0).
""",
}

# five regenerations of the padder spec for the stability protocol
PADDER_VARIANTS = [
    SPECS["padder"],
    """Overview:
padder gathers 32-bit message words into a 576-bit block, pads the message
after the last word and presents each full block to the permutation.

Ports:
- clk: clock input.
- reset: synchronous reset; empties the block buffer.
- in: message word from the user.
- in_ready: in carries a valid word this cycle.
- is_last: the word on in is the final word of the message.
- byte_num: number of valid bytes in the final word, used to place the padding byte.
- buffer_full: the block buffer is full and no user word is accepted.
- out: the 576-bit block passed to f_permutation.
- out_ready: a complete block is available on out; same as buffer_full.
- f_ack: f_permutation took the block; the buffer empties.

Function:
While not full, padder shifts each accepted word into the block buffer. A
word is accepted only when in_ready is high and buffer_full is low. After
is_last it inserts the padding word from padder1 and fills the rest of the
block with zeros, setting the final padding bit. When the buffer is full it
raises out_ready and waits for f_ack, which empties the buffer. After reset
out_ready and buffer_full are low.
""",
    """Overview:
padder collects message words of 32 bits into a 576-bit block, applies SHA3
padding after the last word and offers every full block to the permutation.

Ports:
- clk: clock.
- reset: synchronous reset; clears the block buffer and its fill level.
- in: message word from the user.
- in_ready: in is valid in this cycle.
- is_last: the word on in is the last message word.
- byte_num: valid bytes of the last word; selects where the padding byte goes.
- buffer_full: the block buffer is full, so user words are not accepted.
- out: the 576-bit block handed to f_permutation.
- out_ready: a full block is available on out; equal to buffer_full.
- f_ack: f_permutation has accepted the block and the buffer empties.

Function:
Each accepted word is shifted into the block buffer while it is not full. A
word is accepted only when in_ready is high and buffer_full is low. After
is_last the padding word produced by padder1 is inserted and the rest of
the block is filled with zeros with the final padding bit set. A full buffer
raises out_ready until f_ack empties it. After reset out_ready and
buffer_full are low.
""",
    """Overview:
padder buffers 32-bit message words into a 576-bit block, applies the SHA3
padding once the last word has arrived and offers each full block to the
permutation.

Ports:
- clk: clock input.
- reset: synchronous reset; clears the block buffer and the fill level.
- in: message word from the user side.
- in_ready: in is valid this cycle.
- is_last: the word on in is the last word of the message.
- byte_num: valid bytes in the last word, used to place the padding byte.
- buffer_full: the block buffer is full; user words are not accepted.
- out: the 576-bit block handed to f_permutation.
- out_ready: a complete block is available on out; equal to buffer_full.
- f_ack: f_permutation has taken the block, which empties the buffer.

Function:
While the buffer is not full, padder shifts each accepted word into it. A
word is accepted only when in_ready is high and buffer_full is low. After
is_last it adds the padding word produced by padder1 and fills the rest of
the block with zeros, setting the final padding bit. When the buffer is full
it raises out_ready and waits for f_ack, which empties the buffer. After
reset both out_ready and buffer_full are low.
""",
    """Overview:
padder collects 32-bit message words into a 576-bit block, applies the SHA3
padding after the last word and offers each full block to the permutation.

Ports:
- clk: clock input.
- reset: synchronous reset that clears the block buffer and the fill level.
- in: message word from the user.
- in_ready: in is valid this cycle.
- is_last: the word on in is the last word of the message.
- byte_num: valid bytes in the last word, used to position the padding byte.
- buffer_full: the block buffer is full; words from the user are not accepted.
- out: the 576-bit block for f_permutation.
- out_ready: a complete block is on out; equal to buffer_full.
- f_ack: f_permutation has taken the block; the buffer empties.

Function:
While not full, padder shifts every accepted word into its block buffer. A
word is accepted only when in_ready is high and buffer_full is low. After
is_last it inserts the padding word produced by padder1, fills the rest of
the block with zeros and sets the final padding bit. When the buffer is full
it raises out_ready and waits for f_ack, which empties the buffer. After
reset out_ready and buffer_full are low.
""",
]

FEATURES = {
    "fifo1": """1. `full` and `empty` are never high at the same time.
2. Whenever `empty` is low, `full` is high.
3. While `reset` is high the buffer reports `full` low.
4. A `pop` while `empty` is high leaves `full` low.
""",
    "keccak": """1. While `reset` is asserted, `out_ready` is low.
2. When `out_ready` is high, `buffer_full` reflects that no further message words are accepted.
3. A word on `in` is accepted only when `in_ready` is high and `buffer_full` is low.
""",
    "padder": """1. While `reset` is asserted, `out_ready` is low.
2. `out_ready` always equals `buffer_full`.
3. When `buffer_full` is high, `out_ready` is high.
4. When `out_ready` is low, `buffer_full` is low.
5. When `f_ack` is high, `out_ready` is high, because a block is only taken when one is offered.
6. The internal counter `count_i` never exceeds the block size.
7. A word is accepted only when `in_ready` is high and `buffer_full` is low.
""",
    "padder1": """1. When `byte_num` is 0, `out` equals 32'h01000000.
2. When `byte_num` is 3, the low byte of `out` is 8'h01.
3. When `byte_num` is 1, bits 23 to 16 of `out` are 8'h01.
""",
    "f_permutation": """1. While `reset` is asserted, `out_ready` is low.
2. When `ack` is high, `in_ready` is high.
3. When `ack` is high, `out_ready` is low in the same cycle it is cleared.
""",
    "rconst": """1. When `i` is zero, `rc` is zero.
2. Bit 2 of `rc` is always zero.
""",
    "round": """1. When `in` is zero and `round_const` is zero, `out` is zero.
""",
}

MINING = {
    "fifo1": """```systemverilog
// feature 1
assert property (@(posedge clk) (fifo1.full) |-> (fifo1.empty == 0));
// feature 2
assert property (@(posedge clk) (!fifo1.empty) |-> (fifo1.full));
// feature 3
assert property (@(posedge clk) (fifo1.reset) |-> (fifo1.full == 1'b0));
// feature 1
assert property (@(posedge clk) (fifo1.full) |-> (fifo1.empty == 0));
// feature 4
assert property (@(posedge clk) (fifo1.pop && fifo1.empty) |-> (fifo1.full == 0));
```
""",
    "keccak": """```systemverilog
// feature 1
assert property (@(posedge clk) (keccak.reset) |-> (keccak.out_ready == 0));
// feature 3
assert property (@(posedge clk) (keccak.in_ready && !keccak.buffer_full) |-> (keccak.buffer_full == 0));
```
""",
    "padder": """The assertions below follow the template.

```systemverilog
// feature 1
assert property (@(posedge clk) (padder.reset) |-> (padder.out_ready == 0));
// feature 2
assert property (@(posedge clk) (padder.out_ready) |-> (padder.buffer_full == 1));
// feature 2
assert property (@(posedge clk) (!padder.out_ready) |-> (padder.buffer_full == 0));
// feature 3
assert property (@(posedge clk) (padder.buffer_full) |-> (padder.out_ready));
// feature 4
assert property (@(posedge clk) (padder.out_ready == 0) |-> (!padder.buffer_full));
// feature 5
assert property (@(posedge clk) (padder.f_ack) |-> ($past(padder.out_ready)));
```
```systemverilog
// feature 6
assert property (@(posedge clk) (padder.in_ready && padder.buffer_full) |-> (padder.out_ready));
// feature 5
assert property (@(posedge clk) (padder.f_ack) |-> (padder.state == 0));
```
""",
    "padder1": """```systemverilog
// feature 1
assert property (@(posedge clk) (padder1.byte_num == 0) |-> (padder1.out == 32'h1000000));
// feature 2
assert property (@(posedge clk) (padder1.byte_num == 2'd3) |-> (padder1.out[7:0] == 8'h01));
// feature 3
assert property (@(posedge clk) (padder1.byte_num == 1) |-> (padder1.out[23:16] == 8'h01));
```
""",
    "f_permutation": """```systemverilog
// feature 1
assert property (@(posedge clk) (f_permutation.reset) |-> (f_permutation.out_ready == 0));
// feature 2
assert property (@(posedge clk) (f_permutation.ack) |-> (f_permutation.in_ready));
// feature 3
assert property (@(posedge clk) (f_permutation.ack) |=> (f_permutation.out_ready == 0));
```
""",
    "rconst": """```systemverilog
// feature 1
assert property (@(posedge clk) (rconst.i == 0) |-> (rconst.rc == 0));
// feature 2
assert property (@(posedge clk) (rconst.i != 0 || rconst.i == 0) |-> (rconst.rc[2] == 1'b0));
```
""",
    "round": """```systemverilog
// feature 1
assert property (@(posedge clk) (round.in == 0 && round.round_const == 0) |-> (round.out == 0));
```
""",
}


def _kind(system: str) -> str:
    if "module-level" in system:
        return "spec"
    if "verification features" in system:
        return "features"
    return "mining"


def responder(table: dict[str, dict[str, str]], variants: dict[str, list[str]] | None = None):
    counters: dict[tuple, int] = defaultdict(int)

    def handle(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        system, user = body["messages"][0]["content"], body["messages"][1]["content"]
        kind = _kind(system)
        module = re.search(r"^(?:Target module|Module): (\w+)$", user, re.M).group(1)
        if variants and kind == "spec" and module in variants:
            n = counters[(kind, module)]
            counters[(kind, module)] += 1
            text = variants[module][n]
        else:
            text = table[kind][module]
        return httpx.Response(200, json={
            "id": f"fixture-{kind}-{module}",
            "model": "hand-authored",
            "choices": [{"message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
            "usage": {"prompt_tokens": len(system + user) // 4, "completion_tokens": len(text) // 4},
        })

    return handle


def record(cfg: PipelineConfig, fixtures: Path, command: str, handler, k: int = 5) -> None:
    if fixtures.exists():
        fixtures.unlink()
    client = httpx.Client(transport=httpx.MockTransport(handler))
    gw = Gateway(GatewayConfig(max_in_flight=1), ReplayStore("record", fixtures), api_key="fixture", client=client)
    with tempfile.TemporaryDirectory() as tmp:
        run = run_pipeline(PipelineConfig(**{**cfg.__dict__, "out": tmp, "mode": "record"}), command, gw, k=k)
    for d in run.diags:
        if d.severity == "error":
            raise SystemExit(f"recording failed: {d}")
    lines = sorted(fixtures.read_text().splitlines(),
                   key=lambda l: (json.loads(l)["template_id"], json.loads(l)["fingerprint"], json.loads(l)["run"]))
    fixtures.write_text("\n".join(dict.fromkeys(lines)) + "\n")
    print(f"{fixtures}: {len(set(lines))} entries")


def main() -> None:
    table = {"spec": SPECS, "features": FEATURES, "mining": MINING}
    sha3 = sorted(str(p.relative_to(ROOT)) for p in (FIX / "sha3").glob("*.v"))
    toy = PipelineConfig(rtl=("tests/fixtures/toy/fifo1.v",), spec="tests/fixtures/toy/spec.md")
    sha3_cfg = PipelineConfig(rtl=tuple(sha3), spec="tests/fixtures/sha3/sha3_spec.md")
    import os
    os.chdir(ROOT)
    record(toy, FIX / "toy" / "replay.jsonl", "pipeline", responder(table))
    record(sha3_cfg, FIX / "sha3" / "replay.jsonl", "pipeline", responder(table))
    stab = PipelineConfig(**{**sha3_cfg.__dict__, "modules": ("padder",)})
    record(stab, FIX / "sha3" / "stability.jsonl", "stability", responder(table, {"padder": PADDER_VARIANTS}))
    shutil.rmtree(ROOT / "out", ignore_errors=True)


if __name__ == "__main__":
    main()
