"""Module-level specification synthesis and verification-feature extraction.

Prompts are composed only from structural facts (I/O table, call-graph
neighbours, port-only signal chains) plus the design-level specification;
module bodies never enter a prompt.
"""

from __future__ import annotations

import logging
import math
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import SCHEMA_VERSION
from .diagnostics import Diagnostic, info, warning
from .llm.gateway import Completion, Gateway, Prompt
from .llm.templates import Template, load_template
from .structure.chains import SignalChain
from .structure.iotable import IoTable
from .structure.mcg import ModuleCallGraph
from .structure.signals import split_ref
from .verilog.elaborate import DesignDB

log = logging.getLogger(__name__)

SPEC_TEMPLATE = "module_spec.v1"
FEATURE_TEMPLATE = "features.v1"
DEFAULT_TOKEN_BUDGET = 6000
CATEGORIES = ("handshake", "data-integrity", "reset", "control", "other")


class ContextOverflow(Exception):
    pass


class SpecParseError(Exception):
    pass


class FeatureParseError(Exception):
    pass


def estimate_tokens(text: str) -> int:
    """Rough token count (four characters per token)."""
    return math.ceil(len(text) / 4)


# -- prompt composition ------------------------------------------------------


def module_of(db: DesignDB, path: str) -> Optional[str]:
    for node in db.instances():
        if node.path == path:
            return node.module
    return None


def chains_touching(module: str, chains: Iterable[SignalChain], db: DesignDB) -> list[SignalChain]:
    """Chains that pass through at least one port of an instance of ``module``."""
    paths = {n.path for n in db.instances_of(module)}
    ports = {p.name for p in db.modules[module].ports}
    out = []
    for chain in chains:
        for r in chain.signals:
            path, sig = split_ref(r)
            if path in paths and sig in ports:
                out.append(chain)
                break
    return out


def mcg_context(module: str, mcg: ModuleCallGraph) -> str:
    parents = [e for e in mcg.edges if e.child == module]
    children = mcg.children(module)
    if parents:
        up = "; ".join(f"{e.parent} (as instance {e.instance})" for e in parents)
    else:
        up = "none (top-level module)"
    if children:
        down = "; ".join(
            f"{e.child} (instance {e.instance}{', external' if mcg.is_external(e.child) else ''})"
            for e in children
        )
    else:
        down = "none (leaf module)"
    return f"Instantiated by: {up}\nInstantiates: {down}"


def render_chains(chains: Sequence[SignalChain]) -> str:
    if not chains:
        return "none"
    return "\n".join(f"- {c.render()}" for c in chains)


def fit_to_budget(template: Template, values: dict[str, str], chains: list[SignalChain],
                  chain_key: str, spec_key: Optional[str], budget: int) -> tuple[str, str, list[str]]:
    """Render, dropping chains longest-first and then trimming the spec until it fits."""
    notes: list[str] = []
    chains = list(chains)
    values = dict(values)
    while True:
        values[chain_key] = render_chains(chains)
        system, user = template.render(values)
        size = estimate_tokens(system + user)
        if size <= budget:
            return system, user, notes
        if chains:
            longest = max(range(len(chains)), key=lambda i: (len(chains[i]), i))
            dropped = chains.pop(longest)
            notes.append(f"dropped chain ({len(dropped)} signals): {dropped.render()}")
            log.info("context budget: %s", notes[-1])
            continue
        if spec_key and values.get(spec_key):
            text = values[spec_key]
            excess_chars = (size - budget) * 4 + 16
            keep = max(0, len(text) - excess_chars)
            values[spec_key] = text[:keep].rstrip() + ("\n[... truncated]" if keep else "[truncated]")
            if keep == 0:
                values[spec_key] = ""
            notes.append(f"truncated {spec_key} to {keep} characters")
            log.info("context budget: %s", notes[-1])
            continue
        raise ContextOverflow(f"prompt needs {size} tokens even without chains or spec text; budget is {budget}")


def compose_spec_prompt(module: str, db: DesignDB, mcg: ModuleCallGraph, table: IoTable,
                        chains: Iterable[SignalChain], design_spec: str,
                        template: Optional[Template] = None,
                        token_budget: int = DEFAULT_TOKEN_BUDGET,
                        temperature: float = 0.2, max_tokens: int = 2048) -> Prompt:
    if not design_spec.strip():
        raise ValueError("design specification text is empty")
    template = template or load_template(SPEC_TEMPLATE)
    touching = chains_touching(module, chains, db)
    values = {
        "design_spec": design_spec.strip(),
        "module_name": module,
        "io_table": table.render(),
        "mcg_context": mcg_context(module, mcg),
    }
    system, user, notes = fit_to_budget(template, values, touching, "signal_chains", "design_spec", token_budget)
    values["signal_chains"] = "(see prompt)"
    return Prompt(system, user, temperature, max_tokens, template.id, values, tuple(notes))


def module_body_lines(db: DesignDB, module: str, sources: Sequence[tuple[str, str]]) -> list[str]:
    """Normalized source lines of ``module``, from its header to ``endmodule``.

    Comments are stripped and whitespace collapsed. Lines with fewer than two
    significant tokens (a lone ``end``, a module name on its own line before
    an instance name, ``update;``) are skipped: they say nothing about the
    implementation and would match ordinary prose.
    """
    decl = db.modules[module]
    text = dict(sources).get(decl.loc.file)
    if text is None:
        return []
    text = re.sub(r"/\*.*?\*/", lambda m: "\n" * m.group().count("\n"), text, flags=re.S)
    out = []
    for line in text.splitlines()[decl.loc.line - 1:decl.end_loc.line]:
        norm = " ".join(re.sub(r"//.*", "", line).split())
        if len(_SIGNIFICANT.findall(norm)) >= 2:
            out.append(norm)
    return out


_SIGNIFICANT = re.compile(r"[A-Za-z_$][\w$]*|\d\w*|'[sS]?[bBoOdDhH]\w+|[^\w\s;,()]+")


def hygiene_violations(prompt: Prompt, body_lines: Iterable[str]) -> list[str]:
    text = " ".join(prompt.text.split())
    return [line for line in body_lines if line in text]


# -- module specs ------------------------------------------------------------

_SECTION = re.compile(
    r"^\s*(?:#{1,6}\s*)?(?:\*\*)?\s*(overview|ports?|function(?:al description|ality)?)\s*(?:\*\*)?\s*:?\s*(?:\*\*)?\s*(.*)$",
    re.IGNORECASE,
)
_PORT_LINE = re.compile(r"^\s*(?:[-*+]|\d+[.)])?\s*`?([A-Za-z_][\w]*)`?\s*(?:\([^)]*\))?\s*(?::|-|–|=)\s*(.+)$")
_PORT_ROW = re.compile(r"^\s*\|\s*`?([A-Za-z_]\w*)`?\s*\|(.+)\|\s*$")


@dataclass(frozen=True)
class ModuleSpec:
    module: str
    overview: str
    ports: tuple  # of (port name, description), IoTable order
    function: str
    text: str  # raw completion
    degraded_parse: bool = False
    template_id: str = ""
    fingerprint: str = ""
    run: int = 0

    def port(self, name: str) -> Optional[str]:
        return dict(self.ports).get(name)

    def render(self) -> str:
        ports = "\n".join(f"- {n}: {d}" for n, d in self.ports)
        return f"Overview:\n{self.overview}\n\nPorts:\n{ports}\n\nFunction:\n{self.function}"

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "module_spec",
            "module": self.module,
            "overview": self.overview,
            "ports": [{"name": n, "description": d} for n, d in self.ports],
            "function": self.function,
            "text": self.text,
            "degraded_parse": self.degraded_parse,
            "provenance": {"template_id": self.template_id, "fingerprint": self.fingerprint, "run": self.run},
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModuleSpec":
        prov = data.get("provenance", {})
        return cls(
            data["module"], data["overview"], tuple((p["name"], p["description"]) for p in data["ports"]),
            data["function"], data["text"], data.get("degraded_parse", False),
            prov.get("template_id", ""), prov.get("fingerprint", ""), prov.get("run", 0),
        )


def parse_spec_text(module: str, text: str, table: IoTable) -> ModuleSpec:
    if not text.strip():
        raise SpecParseError(f"empty specification completion for module '{module}'")
    sections: dict[str, list[str]] = {}
    current = None
    for line in text.splitlines():
        m = _SECTION.match(line)
        if m:
            label = m.group(1).lower()
            current = "overview" if label == "overview" else "ports" if label.startswith("port") else "function"
            sections.setdefault(current, [])
            if m.group(2).strip():
                sections[current].append(m.group(2))
            continue
        if current is not None:
            sections[current].append(line)

    known = {r.name for r in table.rows}
    descriptions: dict[str, str] = {}
    for line in sections.get("ports", []):
        m = _PORT_ROW.match(line) or _PORT_LINE.match(line)
        if m and m.group(1) in known and m.group(1) not in descriptions:
            desc = m.group(2).strip().strip("|").strip()
            descriptions[m.group(1)] = desc.split("|")[-1].strip() if "|" in desc else desc
    ports = tuple((r.name, descriptions.get(r.name, "unknown")) for r in table.rows)

    if not sections:
        return ModuleSpec(module, "", ports, text.strip(), text, degraded_parse=True)
    return ModuleSpec(
        module,
        "\n".join(sections.get("overview", [])).strip(),
        ports,
        "\n".join(sections.get("function", [])).strip(),
        text,
    )


def generate_module_spec(prompt: Prompt, gw: Gateway, module: str, table: IoTable, run: int = 0) -> ModuleSpec:
    completion = gw.complete(prompt, run)
    spec = parse_spec_text(module, completion.text, table)
    return ModuleSpec(spec.module, spec.overview, spec.ports, spec.function, spec.text, spec.degraded_parse,
                      prompt.template_id, prompt.fingerprint, run)


# -- verification features ---------------------------------------------------

_ITEM = re.compile(r"^\s*(\d+)[.)]\s+(.*\S)\s*$")
_BACKTICK = re.compile(r"`([^`]+)`")
_LITERAL = re.compile(r"\d*'[sS]?[bBoOdDhH][0-9a-fA-FxXzZ_?]+")
_IDENTIFIER = re.compile(r"[A-Za-z_][\w$]*(?:\.[A-Za-z_][\w$]*)*")

_CATEGORY_WORDS = (
    ("reset", {"reset", "rst", "resets", "resetting"}),
    ("handshake", {"ready", "valid", "ack", "acknowledge", "acknowledged", "req", "request", "handshake",
                   "full", "empty", "busy", "grant", "stall"}),
    ("data-integrity", {"data", "value", "values", "equal", "equals", "match", "matches", "integrity",
                        "parity", "hash", "digest", "preserved", "stable", "unchanged", "padding", "padded"}),
    ("control", {"enable", "enabled", "state", "mode", "select", "control", "start", "done", "last",
                 "counter", "count", "when", "only"}),
)


@dataclass(frozen=True)
class VerificationFeature:
    module: str
    ordinal: int
    statement: str
    signals: tuple
    category: str

    @property
    def id(self) -> str:
        return f"{self.module}.F{self.ordinal}"

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "module": self.module,
            "ordinal": self.ordinal,
            "statement": self.statement,
            "signals": list(self.signals),
            "category": self.category,
        }

    @classmethod
    def from_json(cls, data: dict) -> "VerificationFeature":
        return cls(data["module"], data["ordinal"], data["statement"], tuple(data["signals"]), data["category"])


def features_to_json(module: str, features: Sequence[VerificationFeature], diagnostics=()) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "verification_features",
        "module": module,
        "features": [f.to_json() for f in features],
        "diagnostics": [d.to_json() for d in diagnostics],
    }


def categorize(statement: str) -> str:
    words = set(re.split(r"[^a-z0-9]+", statement.lower().replace("_", " ")))
    for name, keys in _CATEGORY_WORDS:
        if words & keys:
            return name
    return "other"


def referenced_signals(statement: str, module: str, ports: Sequence[str]) -> tuple[list[str], list[str]]:
    """(port names referenced, unknown names referenced) in a feature statement.

    Backticked spans are treated as signal references. Without any
    backticks, bare words equal to a port name count as references.
    """
    port_set = set(ports)
    found: list[str] = []
    unknown: list[str] = []
    spans = _BACKTICK.findall(statement)
    if spans:
        for span in spans:
            span = _LITERAL.sub(" ", span)
            for ident in _IDENTIFIER.findall(span):
                name = ident.split(".")[-1] if "." in ident else ident
                if name in port_set:
                    found.append(name)
                else:
                    unknown.append(ident)
    else:
        for word in re.findall(r"[A-Za-z_]\w*", statement):
            if word in port_set:
                found.append(word)
    return list(dict.fromkeys(found)), list(dict.fromkeys(unknown))


def _one_sentence(text: str) -> Optional[str]:
    text = text.strip().rstrip()
    if not text:
        return None
    if text[-1] not in ".!?":
        text += "."
    body = re.sub(r"\d\.\d", "", text[:-1])
    if re.search(r"[.!?]\s+[A-Z`]", body):
        return None
    return text


def parse_features(text: str, module: str, table: IoTable) -> tuple[list[VerificationFeature], list[Diagnostic]]:
    items = [(int(m.group(1)), m.group(2)) for m in map(_ITEM.match, text.splitlines()) if m]
    if not items:
        raise FeatureParseError(f"no numbered feature items in completion for module '{module}'")
    diags: list[Diagnostic] = []
    features: list[VerificationFeature] = []
    ports = table.port_names
    for number, raw in items:
        raw = re.sub(r"^\*\*[^*]+\*\*\s*:?\s*", "", raw).strip()
        sentence = _one_sentence(raw)
        if sentence is None:
            diags.append(warning(f"{module}: feature {number} dropped: not a single sentence"))
            continue
        signals, unknown = referenced_signals(sentence, module, ports)
        if unknown:
            diags.append(warning(
                f"{module}: feature {number} dropped: references unknown signal(s) {', '.join(unknown)}"))
            continue
        features.append(VerificationFeature(module, len(features) + 1, sentence, tuple(signals),
                                            categorize(sentence)))
    return features, diags


def compose_feature_prompt(spec: ModuleSpec, table: IoTable, template: Optional[Template] = None,
                           temperature: float = 0.2, max_tokens: int = 2048) -> Prompt:
    template = template or load_template(FEATURE_TEMPLATE)
    ports = table.port_names
    values = {
        "module_name": spec.module,
        "port_list": ", ".join(ports) if ports else "(none)",
        "module_spec": spec.render() if not spec.degraded_parse else spec.text.strip(),
        "example_port": ports[0] if ports else "signal",
    }
    system, user = template.render(values)
    return Prompt(system, user, temperature, max_tokens, template.id, values)


def extract_features(spec: ModuleSpec, table: IoTable, gw: Gateway, template: Optional[Template] = None,
                     temperature: float = 0.2, max_tokens: int = 2048
                     ) -> tuple[list[VerificationFeature], list[Diagnostic]]:
    prompt = compose_feature_prompt(spec, table, template, temperature, max_tokens)
    completion = gw.complete(prompt)
    return parse_features(completion.text, spec.module, table)


# -- regeneration stability --------------------------------------------------

_STRIP = str.maketrans("", "", string.punctuation)


def _bag(text: str) -> Counter:
    return Counter(text.lower().translate(_STRIP).split())


def compute_similarity(a: str, b: str) -> float:
    """Cosine similarity of lowercase word-frequency vectors, punctuation removed."""
    x, y = _bag(a), _bag(b)
    if not x or not y:
        return 1.0 if not x and not y else 0.0
    dot = sum(count * y[word] for word, count in x.items())
    norm_x = sum(c * c for c in x.values())
    norm_y = sum(c * c for c in y.values())
    return min(1.0, dot / math.sqrt(norm_x * norm_y))


@dataclass(frozen=True)
class SimilarityReport:
    module: str
    k: int
    matrix: tuple  # k x k tuple of tuples
    mean: float  # over the k*(k-1)/2 distinct pairs
    fingerprint: str = ""

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "similarity_report",
            "module": self.module,
            "k": self.k,
            "matrix": [list(row) for row in self.matrix],
            "mean": self.mean,
            "fingerprint": self.fingerprint,
        }


def similarity_matrix(texts: Sequence[str]) -> tuple[tuple, float]:
    k = len(texts)
    m = [[1.0] * k for _ in range(k)]
    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            s = compute_similarity(texts[i], texts[j])
            m[i][j] = m[j][i] = s
            pairs.append(s)
    return tuple(tuple(row) for row in m), sum(pairs) / len(pairs)


def stability_run(module: str, prompt: Prompt, k: int, gw: Gateway, table: Optional[IoTable] = None
                  ) -> SimilarityReport:
    """Generate the same module spec ``k`` times and score pairwise similarity.

    Run ``i`` uses fixture run index ``i`` in replay mode, so ``k`` distinct
    recordings of one prompt can be replayed.
    """
    if k < 2:
        raise ValueError("stability run needs k >= 2 regenerations")
    texts = []
    for run in range(k):
        completion: Completion = gw.complete(prompt, run)
        if not completion.text.strip():
            raise SpecParseError(f"empty specification completion for module '{module}' (run {run})")
        texts.append(completion.text)
    matrix, mean = similarity_matrix(texts)
    return SimilarityReport(module, k, matrix, mean, prompt.fingerprint)
