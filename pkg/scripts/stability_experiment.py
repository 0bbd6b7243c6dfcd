"""Regenerate a module specification k times and report pairwise similarity.

With the shipped fixture this replays five hand-written completions for the SHA3
padder. Against a real endpoint (DEEPSVA_API_KEY set) use --mode record to store
fresh completions, then --mode replay to reproduce the numbers offline.

    python scripts/stability_experiment.py
    python scripts/stability_experiment.py --mode record --fixtures runs/stab.jsonl --module keccak -k 10
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from deepsva.cli import main as cli

SHA3 = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "sha3"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--module", action="append", default=None)
    ap.add_argument("-k", type=int, default=5)
    ap.add_argument("--mode", default="replay", choices=("live", "record", "replay"))
    ap.add_argument("--fixtures", default=str(SHA3 / "stability.jsonl"))
    ap.add_argument("--out", default="out/stability")
    args = ap.parse_args()
    modules = args.module or ["padder"]
    rtl = sorted(str(p) for p in SHA3.glob("*.v"))
    argv = ["stability", *rtl, "--spec", str(SHA3 / "sha3_spec.md"), "--mode", args.mode,
            "--fixtures", args.fixtures, "-k", str(args.k), "--out", args.out]
    for m in modules:
        argv += ["--module", m]
    code = cli(argv)
    for m in modules:
        path = Path(args.out) / "stability" / f"{m}.json"
        if not path.is_file():
            continue
        rep = json.loads(path.read_text())
        print(f"\n{m}: k={rep['k']} mean={rep['mean']:.4f}")
        for row in rep["matrix"]:
            print("  " + " ".join(f"{x:.3f}" for x in row))
    return code


if __name__ == "__main__":
    sys.exit(main())
