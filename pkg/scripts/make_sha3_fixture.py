"""Write the SHA3 test design into tests/fixtures/sha3/.

The design follows the low-throughput SHA3 core published on OpenCores
(Homer Hsing, Apache-2.0): keccak -> padder -> padder1 and
keccak -> f_permutation -> {rconst, round}. The original relies on
`define macros and generate loops, which lie outside the supported Verilog
subset, so those regions are emitted here as the explicit assignments they
expand to. Module names, ports, registers and control logic are kept.

    python scripts/make_sha3_fixture.py
"""

from __future__ import annotations

from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "sha3"

HEADER = """\
// SHA3 low-throughput core, after the OpenCores design by Homer Hsing
// (Apache-2.0). Macro and generate regions are written out explicitly.
"""

# rotation offsets r[x][y]
RHO = [
    [0, 36, 3, 41, 18],
    [1, 44, 10, 45, 2],
    [62, 6, 43, 15, 61],
    [28, 55, 25, 21, 56],
    [27, 20, 39, 8, 14],
]


def hi(x: int, y: int) -> int:
    return 1599 - 64 * (5 * y + x)


def rot(expr: str, n: int) -> str:
    if n == 0:
        return expr
    if n == 1:
        return f"{{{expr}[62:0], {expr}[63]}}"
    return f"{{{expr}[{63 - n}:0], {expr}[63:{64 - n}]}}"


def reorder(dst: str, src: str, words: int) -> list[str]:
    lines = []
    for w in range(words):
        for b in range(8):
            lo, lo2 = w * 64 + b * 8, w * 64 + (7 - b) * 8
            lines.append(f"    assign {dst}[{lo + 7}:{lo}] = {src}[{lo2 + 7}:{lo2}];")
    return lines


def keccak() -> str:
    body = "\n".join(reorder("out", "out1", 8) + [""] + reorder("padder_out", "padder_out_1", 9))
    return HEADER + f"""
module keccak(clk, reset, in, in_ready, is_last, byte_num, buffer_full, out, out_ready);
    input              clk, reset;
    input      [31:0]  in;
    input              in_ready, is_last;
    input      [1:0]   byte_num;
    output             buffer_full; /* to "user" module */
    output     [511:0] out;
    output reg         out_ready;

    reg                state;     /* 0: more input follows; 1: input finished */
    wire       [575:0] padder_out,
                       padder_out_1; /* before byte reorder */
    wire               padder_out_ready;
    wire               f_ack;
    wire      [1599:0] f_out;
    wire               f_out_ready;
    wire       [511:0] out1;      /* before byte reorder */
    reg        [22:0]  i;         /* delays out_ready */

    assign out1 = f_out[1599:1599-511];

    always @ (posedge clk)
      if (reset)
        i <= 0;
      else
        i <= {{i[21:0], state & f_ack}};

    always @ (posedge clk)
      if (reset)
        state <= 0;
      else if (is_last)
        state <= 1;

    /* byte reorder */
{body}

    always @ (posedge clk)
      if (reset)
        out_ready <= 0;
      else if (i[22])
        out_ready <= 1;

    padder
      padder_ (clk, reset, in, in_ready, is_last, byte_num, buffer_full, padder_out_1, padder_out_ready, f_ack);

    f_permutation
      f_permutation_ (clk, reset, padder_out, padder_out_ready, f_ack, f_out, f_out_ready);
endmodule
"""


PADDER = HEADER + """
module padder(clk, reset, in, in_ready, is_last, byte_num, buffer_full, out, out_ready, f_ack);
    input              clk, reset;
    input      [31:0]  in;
    input              in_ready, is_last;
    input      [1:0]   byte_num;
    output             buffer_full; /* to "user" module */
    output reg [575:0] out;         /* to "f_permutation" module */
    output             out_ready;   /* to "f_permutation" module */
    input              f_ack;       /* from "f_permutation" module */

    reg                state;       /* 0: more input follows; 1: input finished */
    reg                done;        /* 1: out_ready should be 0 */
    reg        [17:0]  i;           /* fill level of "out" */
    wire       [31:0]  v0;          /* output of padder1 */
    reg        [31:0]  v1;          /* shifted into "out" */
    wire               accept,      /* take user input? */
                       update;

    assign buffer_full = i[17];
    assign out_ready = buffer_full;
    assign accept = (~ state) & in_ready & (~ buffer_full);
    assign update = (accept | (state & (~ buffer_full))) & (~ done);

    always @ (posedge clk)
      if (reset)
        out <= 0;
      else if (update)
        out <= {out[575-32:0], v1};

    always @ (posedge clk)
      if (reset)
        i <= 0;
      else if (f_ack | update)
        i <= {i[16:0], 1'b1} & {18{~ f_ack}};

    always @ (posedge clk)
      if (reset)
        state <= 0;
      else if (is_last)
        state <= 1;

    always @ (posedge clk)
      if (reset)
        done <= 0;
      else if (state & out_ready)
        done <= 1;

    padder1 p0 (in, byte_num, v0);

    always @ (*)
      begin
        if (state)
          begin
            v1 = 0;
            v1[7] = v1[7] | i[16]; /* last bit of the last byte */
          end
        else if (is_last == 0)
          v1 = in;
        else
          begin
            v1 = v0;
            v1[7] = v1[7] | i[16];
          end
      end
endmodule
"""

PADDER1 = HEADER + """
module padder1(in, byte_num, out);
    input      [31:0] in;
    input      [1:0]  byte_num;
    output reg [31:0] out;

    always @ (*)
      case (byte_num)
        0: out = 32'h1000000;
        1: out = {in[31:24], 24'h010000};
        2: out = {in[31:16], 16'h0100};
        3: out = {in[31:8],    8'h01};
      endcase
endmodule
"""

F_PERMUTATION = HEADER + """
module f_permutation(clk, reset, in, in_ready, ack, out, out_ready);
    input               clk, reset;
    input      [575:0]  in;
    input               in_ready;
    output              ack;
    output reg [1599:0] out;
    output reg          out_ready;

    reg        [22:0]   i;    /* selects the round constant */
    wire       [1599:0] round_in, round_out;
    wire       [63:0]   rc;   /* round constant */
    wire                update;
    wire                accept;
    reg                 calc; /* 1: rounds in progress */

    assign accept = in_ready & (~ calc);

    always @ (posedge clk)
      if (reset) i <= 0;
      else       i <= {i[21:0], accept};

    always @ (posedge clk)
      if (reset) calc <= 0;
      else       calc <= (calc & (~ i[22])) | accept;

    assign update = calc | accept;

    assign ack = accept;

    always @ (posedge clk)
      if (reset)
        out_ready <= 0;
      else if (accept)
        out_ready <= 0;
      else if (i[22]) /* last round */
        out_ready <= 1;

    assign round_in = accept ? {in ^ out[1599:1599-575], out[1599-576:0]} : out;

    rconst
      rconst_ ({i, accept}, rc);

    round
      round_ (round_in, rc, round_out);

    always @ (posedge clk)
      if (reset)
        out <= 0;
      else if (update)
        out <= round_out;
endmodule
"""

RCONST = HEADER + """
module rconst(i, rc);
    input      [23:0] i;
    output reg [63:0] rc;

    always @ (i)
      begin
        rc = 0;
        rc[0] = i[0] | i[4] | i[5] | i[6] | i[7] | i[10] | i[12] | i[13] | i[14] | i[15] | i[20] | i[22];
        rc[1] = i[1] | i[2] | i[4] | i[8] | i[11] | i[12] | i[13] | i[15] | i[16] | i[18] | i[19];
        rc[3] = i[2] | i[4] | i[7] | i[8] | i[9] | i[10] | i[11] | i[12] | i[13] | i[14] | i[18] | i[19] | i[23];
        rc[7] = i[1] | i[2] | i[4] | i[6] | i[8] | i[9] | i[12] | i[13] | i[14] | i[17] | i[20] | i[21];
        rc[15] = i[1] | i[2] | i[3] | i[4] | i[6] | i[7] | i[10] | i[12] | i[14] | i[15] | i[16] | i[18] | i[20] | i[21] | i[23];
        rc[31] = i[3] | i[5] | i[6] | i[10] | i[11] | i[12] | i[19] | i[20] | i[22] | i[23];
        rc[63] = i[2] | i[3] | i[6] | i[7] | i[13] | i[14] | i[15] | i[16] | i[17] | i[19] | i[20] | i[21] | i[23];
      end
endmodule
"""


def round_module() -> str:
    xy = [(x, y) for y in range(5) for x in range(5)]
    names = ", ".join(f"{v}_{x}_{y}" for v in "acdefg" for x, y in xy)
    lines = [
        "module round(in, round_const, out);",
        "    input      [1599:0] in;",
        "    input      [63:0]   round_const;",
        "    output     [1599:0] out;",
        "",
        f"    wire       [63:0]   b_0, b_1, b_2, b_3, b_4;",
        f"    wire       [63:0]   {names};",
        "",
        "    /* a[x][y] = lane (x, y) of the state */",
    ]
    lines += [f"    assign a_{x}_{y} = in[{hi(x, y)}:{hi(x, y) - 63}];" for x, y in xy]
    lines.append("\n    /* b[x] = column parity */")
    lines += [f"    assign b_{x} = " + " ^ ".join(f"a_{x}_{y}" for y in range(5)) + ";" for x in range(5)]
    lines.append("\n    /* theta */")
    lines += [f"    assign c_{x}_{y} = a_{x}_{y} ^ b_{(x - 1) % 5} ^ {rot(f'b_{(x + 1) % 5}', 1)};" for x, y in xy]
    lines.append("\n    /* rho */")
    lines += [f"    assign d_{x}_{y} = {rot(f'c_{x}_{y}', RHO[x][y])};" for x, y in xy]
    lines.append("\n    /* pi */")
    lines += [f"    assign e_{y}_{(2 * x + 3 * y) % 5} = d_{x}_{y};" for x, y in xy]
    lines.append("\n    /* chi */")
    lines += [f"    assign f_{x}_{y} = e_{x}_{y} ^ ((~ e_{(x + 1) % 5}_{y}) & e_{(x + 2) % 5}_{y});" for x, y in xy]
    lines.append("\n    /* iota */")
    lines += [f"    assign g_{x}_{y} = f_{x}_{y}" + (" ^ round_const;" if (x, y) == (0, 0) else ";") for x, y in xy]
    lines.append("\n    /* out[x][y] = g[x][y] */")
    lines += [f"    assign out[{hi(x, y)}:{hi(x, y) - 63}] = g_{x}_{y};" for x, y in xy]
    lines.append("endmodule")
    return HEADER + "\n" + "\n".join(lines) + "\n"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "keccak.v": keccak(),
        "padder.v": PADDER,
        "padder1.v": PADDER1,
        "f_permutation.v": F_PERMUTATION,
        "rconst.v": RCONST,
        "round.v": round_module(),
    }
    for name, text in files.items():
        (OUT / name).write_text(text, encoding="utf-8")
        print(OUT / name)


if __name__ == "__main__":
    main()
