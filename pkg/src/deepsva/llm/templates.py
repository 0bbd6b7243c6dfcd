"""Prompt templates: ``{name}`` placeholders, ``{{``/``}}`` escapes."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

_TOKEN = re.compile(r"\{\{|\}\}|\{([A-Za-z_][A-Za-z0-9_]*)\}")


class TemplateError(Exception):
    def __init__(self, missing: list[str]):
        self.missing = missing
        super().__init__("missing template values: " + ", ".join(missing))


def placeholders(template: str) -> list[str]:
    return list(dict.fromkeys(m.group(1) for m in _TOKEN.finditer(template) if m.group(1)))


def render_template(template: str, values: Mapping[str, str]) -> str:
    missing = [name for name in placeholders(template) if name not in values]
    if missing:
        raise TemplateError(missing)

    def sub(m: re.Match) -> str:
        if m.group(0) == "{{":
            return "{"
        if m.group(0) == "}}":
            return "}"
        return str(values[m.group(1)])

    return _TOKEN.sub(sub, template)


@dataclass(frozen=True)
class Template:
    id: str
    system: str
    user: str

    def render(self, values: Mapping[str, str]) -> tuple[str, str]:
        return render_template(self.system, values), render_template(self.user, values)


def parse_template(template_id: str, text: str) -> Template:
    """Split a template file into its ``[system]`` and ``[user]`` sections."""
    sections: dict[str, list[str]] = {}
    current: Optional[str] = None
    for line in text.splitlines():
        stripped = line.strip()
        if stripped in ("[system]", "[user]"):
            current = stripped[1:-1]
            sections[current] = []
            continue
        if current is not None:
            sections[current].append(line)
    if "user" not in sections:
        raise ValueError(f"template {template_id}: no [user] section")
    return Template(
        template_id,
        "\n".join(sections.get("system", [])).strip() + "\n",
        "\n".join(sections["user"]).strip() + "\n",
    )


def load_template(name: str, directory: Optional[str | Path] = None) -> Template:
    """Load ``<name>.txt`` from ``directory`` or from the packaged templates.

    ``name`` carries the version, e.g. ``module_spec.v1``; it doubles as the
    template id recorded with every generated artifact.
    """
    filename = f"{name}.txt"
    if directory is not None:
        path = Path(directory) / filename
        if path.exists():
            return parse_template(name, path.read_text(encoding="utf-8"))
    text = resources.files("deepsva").joinpath("templates", filename).read_text(encoding="utf-8")
    return parse_template(name, text)
