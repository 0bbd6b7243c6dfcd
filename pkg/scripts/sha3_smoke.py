"""Replay the full pipeline on the shipped SHA3 core and print the counts.

    python scripts/sha3_smoke.py [--out out/sha3]
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
    ap.add_argument("--out", default="out/sha3")
    args = ap.parse_args()
    rtl = sorted(str(p) for p in SHA3.glob("*.v"))
    code = cli(["pipeline", *rtl, "--spec", str(SHA3 / "sha3_spec.md"),
                "--fixtures", str(SHA3 / "replay.jsonl"), "--out", args.out])
    report = json.loads((Path(args.out) / "run_report.json").read_text())
    mcg = json.loads((Path(args.out) / "mcg.json").read_text())
    print(f"top {report['top']}: {len(mcg['nodes'])} modules, {len(mcg['edges'])} instantiations")
    for stage in report["stages"]:
        print(f"  {stage['name']:<8} {stage['status']}  {report['timestamps']['stage_seconds'].get(stage['name'], 0):.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
