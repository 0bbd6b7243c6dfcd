"""Random template-conforming assertions and single-token mutations of them."""

from __future__ import annotations

import random
from typing import Optional

from .grammar import (RELOPS, APExpr, Assertion, BoolOp, ClockRef, Cmp, Literal, Paren, Sig, SigRef,
                      print_assertion, tokenize)

_NAMES = ("padder", "keccak", "fifo", "u0", "ctrl", "reset", "clk", "out_ready", "data_in", "v", "q_1")

# tokens used as replacements/insertions when mutating
MUTATION_VOCAB = (
    "assert", "property", "posedge", "(", ")", "@", ";", "|->", "&&", "||", "!", "==", "!=", "<", "<=",
    ">", ">=", ".", "[", "]", ":", "a", "b", "3", "8'hFF", "##1", "|=>", "$past", "~", "+", ",",
)


def random_sigref(rng: random.Random) -> SigRef:
    module, signal = rng.choice(_NAMES), rng.choice(_NAMES)
    r = rng.random()
    if r < 0.15:
        return SigRef(module, signal, rng.randrange(64))
    if r < 0.25:
        lsb = rng.randrange(32)
        return SigRef(module, signal, lsb + rng.randrange(32), lsb)
    return SigRef(module, signal)


def random_literal(rng: random.Random) -> Literal:
    kind = rng.choice("dbhn")
    if kind == "n":
        return Literal(str(rng.randrange(1000)))
    width = rng.randint(1, 64)
    if kind == "b":
        return Literal(f"{width}'b" + "".join(rng.choice("01") for _ in range(rng.randint(1, 8))))
    if kind == "h":
        return Literal(f"{width}'h" + "".join(rng.choice("0123456789abcdefABCDEF") for _ in range(rng.randint(1, 8))))
    return Literal(f"{width}'d{rng.randrange(10 ** 6)}")


def random_ap(rng: random.Random, depth: int) -> APExpr:
    """Random AP-expression whose nesting depth is at most ``depth`` (>= 1)."""
    if depth > 1 and rng.random() < 0.35:
        n = rng.randint(2, 3)
        e = _leaf_or_paren(rng, depth)
        for _ in range(n - 1):
            e = _combine(rng.choice(("&&", "||")), e, _leaf_or_paren(rng, depth))
        return e
    return _leaf(rng)


def _combine(op: str, left: APExpr, right: APExpr) -> APExpr:
    # keep the tree in the shape the parser produces (&& tighter, left-assoc)
    if op == "&&" and isinstance(left, BoolOp) and left.op == "||":
        return BoolOp("||", left.left, _combine("&&", left.right, right))
    return BoolOp(op, left, right)


def _leaf_or_paren(rng: random.Random, depth: int) -> APExpr:
    if rng.random() < 0.3:
        return Paren(random_ap(rng, depth - 1))
    return _leaf(rng)


def _leaf(rng: random.Random) -> APExpr:
    if rng.random() < 0.5:
        return Sig(random_sigref(rng), rng.random() < 0.3)
    right = random_sigref(rng) if rng.random() < 0.3 else random_literal(rng)
    return Cmp(random_sigref(rng), rng.choice(RELOPS), right)


def random_assertion(rng: random.Random, depth: int = 4) -> Assertion:
    clock = ClockRef("clk") if rng.random() < 0.7 else ClockRef("clk", rng.choice(_NAMES))
    return Assertion(clock, random_ap(rng, depth), random_ap(rng, depth))


def token_texts(text: str) -> list[str]:
    return [t.text for t in tokenize(text) if t.kind != "end"]


def mutate(text: str, rng: random.Random) -> Optional[str]:
    """Apply one token deletion, insertion, replacement or adjacent swap.

    Returns None when the mutation leaves the token sequence unchanged.
    """
    toks = token_texts(text)
    op = rng.choice(("delete", "insert", "replace", "swap"))
    i = rng.randrange(len(toks))
    if op == "delete":
        out = toks[:i] + toks[i + 1:]
    elif op == "insert":
        out = toks[:i] + [rng.choice(MUTATION_VOCAB)] + toks[i:]
    elif op == "replace":
        out = toks[:i] + [rng.choice(MUTATION_VOCAB)] + toks[i + 1:]
    else:
        if i == len(toks) - 1:
            return None
        out = toks[:i] + [toks[i + 1], toks[i]] + toks[i + 2:]
    if out == toks:
        return None
    return " ".join(out)


def random_assertion_text(rng: random.Random, depth: int = 4) -> str:
    return print_assertion(random_assertion(rng, depth))
