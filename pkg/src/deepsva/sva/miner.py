"""Assertion mining: prompt composition and completion parsing."""

from __future__ import annotations

import re
from typing import Optional, Sequence

from ..diagnostics import Diagnostic, Loc, warning
from ..llm.gateway import Gateway, Prompt
from ..llm.templates import Template, load_template
from ..specgen import DEFAULT_TOKEN_BUDGET, VerificationFeature, fit_to_budget
from ..structure.chains import SignalChain
from ..structure.iotable import IoTable
from .assertion import DeepAssertion, split_statements
from .grammar import TEMPLATE_GRAMMAR

MINING_TEMPLATE = "mining.v1"
_CLOCK_NAMES = re.compile(r"^(clk|clock|clk_i|i_clk|clk_in|hclk|pclk|aclk|sys_clk|wb_clk_i|.*_clk|clk_.*)$", re.I)
_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


class MiningParseError(Exception):
    pass


def guess_clock(table: IoTable, top_table: Optional[IoTable] = None) -> Optional[str]:
    """First input port with a clock-like name, in the module first, then the top."""
    for t in (table, top_table):
        if t is None:
            continue
        for row in t.rows:
            if row.direction == "input" and row.width == 1 and _CLOCK_NAMES.match(row.name):
                return row.name
    return None


def render_features(features: Sequence[VerificationFeature]) -> str:
    return "\n".join(f"{f.ordinal}. {f.statement}" for f in features)


def compose_mining_prompt(features: Sequence[VerificationFeature], chains: Sequence[SignalChain],
                          table: IoTable, clock: str, template: Optional[Template] = None,
                          token_budget: int = DEFAULT_TOKEN_BUDGET,
                          temperature: float = 0.2, max_tokens: int = 2048) -> Prompt:
    if not features:
        raise ValueError(f"no verification features for module '{table.module}'; nothing to mine")
    template = template or load_template(MINING_TEMPLATE)
    values = {
        "module_name": table.module,
        "template_grammar": TEMPLATE_GRAMMAR,
        "clock_name": clock,
        "io_table": table.render(),
        "features": render_features(features),
    }
    system, user, notes = fit_to_budget(template, values, list(chains), "signal_chains", None, token_budget)
    return Prompt(system, user, temperature, max_tokens, template.id, values, tuple(notes))


def parse_mining_completion(text: str, module: str, features: Sequence[VerificationFeature] = (),
                            file: str = "<completion>") -> tuple[list[DeepAssertion], list[Diagnostic]]:
    if not text.strip():
        raise MiningParseError(f"empty mining completion for module '{module}'")
    ordinals = {str(f.ordinal): f.id for f in features}
    ids = {f.id for f in features}
    diags: list[Diagnostic] = []

    blocks = [(m.group(1), text.count("\n", 0, m.start(1)) + 1) for m in _FENCE.finditer(text)]
    statements = []
    if blocks:
        for body, line in blocks:
            statements.extend(split_statements(body, file, line))
    else:
        # no fences: pick up lines that start an assertion and read on to ");"
        lines = text.splitlines()
        i = 0
        tag = None
        while i < len(lines):
            stripped = lines[i].strip()
            m = re.match(r"//\s*(?:feature|source)\s*:?\s*#?\s*(\S+)", stripped, re.I)
            if m:
                tag = m.group(1).rstrip(".:,")
            if re.match(r"(?:[-*]\s*|\d+[.)]\s*)?`?assert\s+property\b", stripped):
                start = i
                chunk = [re.sub(r"^(?:[-*]\s*|\d+[.)]\s*)?`?", "", stripped)]
                while ");" not in chunk[-1] and i + 1 < len(lines):
                    i += 1
                    chunk.append(lines[i].strip())
                stmt = " ".join(chunk)
                stmt = stmt[:stmt.find(");") + 2] if ");" in stmt else stmt
                statements.append((stmt, tag, Loc(file, start + 1, 1)))
            i += 1
        if statements:
            diags.append(warning(f"{module}: no fenced code block; took assertion lines from prose", Loc(file, 1, 1)))

    out = []
    for stmt, tag, loc in statements:
        feature = None
        if tag is not None:
            feature = ordinals.get(tag) or (tag if tag in ids else None)
            if feature is None:
                diags.append(warning(f"{module}: assertion tagged with unknown feature '{tag}'", loc))
        out.append(DeepAssertion(stmt, module, feature, loc=loc))
    if not out:
        diags.append(warning(f"{module}: completion contains no assertions", Loc(file, 1, 1)))
    return out, diags


def mine_assertions(prompt: Prompt, gw: Gateway, module: str, features: Sequence[VerificationFeature] = ()
                    ) -> tuple[list[DeepAssertion], list[Diagnostic]]:
    completion = gw.complete(prompt)
    return parse_mining_completion(completion.text, module, features, f"<mining:{module}>")
