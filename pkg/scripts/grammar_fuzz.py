"""Fuzz the assertion grammar: print/parse roundtrip plus mutant rejection rates.

    python scripts/grammar_fuzz.py --n 5000 --seed 1

Mutants that the optional lark recognizer (tests/sva_oracle.py) still accepts are
counted separately, since a mutation can land back inside the template.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from deepsva.sva.fuzz import mutate, random_assertion_text
from deepsva.sva.grammar import SvaSyntaxError, parse_assertion, print_assertion

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
try:
    from sva_oracle import in_template
except ImportError:  # lark not installed
    in_template = None


def accepts(text: str) -> bool:
    try:
        parse_assertion(text)
    except SvaSyntaxError:
        return False
    return True


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    roundtrip = mutants = rejected = still_valid = disagree = 0
    for _ in range(args.n):
        text = random_assertion_text(rng)
        if print_assertion(parse_assertion(text)) == text:
            roundtrip += 1
        bad = mutate(text, rng)
        if bad is None:
            continue
        mutants += 1
        ours = accepts(bad)
        if in_template is not None:
            theirs = in_template(bad)
            disagree += ours != theirs
            still_valid += theirs
            rejected += not ours and not theirs
        else:
            rejected += not ours

    print(f"generated       {args.n}")
    print(f"roundtrip ok    {roundtrip} ({roundtrip / args.n:.2%})")
    print(f"mutants         {mutants}")
    if in_template is not None:
        out = mutants - still_valid
        print(f"out of template {out}, rejected {rejected} ({rejected / max(out, 1):.2%})")
        print(f"disagreements   {disagree}")
    else:
        print(f"rejected        {rejected} ({rejected / max(mutants, 1):.2%}); lark oracle unavailable")
    return 0 if roundtrip == args.n and disagree == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
