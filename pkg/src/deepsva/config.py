"""Pipeline configuration: a JSON file, overridden by command-line flags."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional

from .llm.gateway import MODES, GatewayConfig
from .specgen import DEFAULT_TOKEN_BUDGET
from .structure.chains import DEFAULT_MAX_CHAINS, DEFAULT_MAX_LENGTH, ChainLimits


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    rtl: tuple = ()
    top: Optional[str] = None
    spec: Optional[str] = None  # design-level specification text
    templates: Optional[str] = None  # directory overriding the packaged prompt templates
    mode: str = "replay"
    fixtures: Optional[str] = None
    out: str = "out"
    max_chains: int = DEFAULT_MAX_CHAINS
    max_chain_len: int = DEFAULT_MAX_LENGTH
    include_control: bool = True
    token_budget: int = DEFAULT_TOKEN_BUDGET
    modules: tuple = ()  # restrict LLM stages to these modules; empty means every defined module
    endpoint: str = GatewayConfig.endpoint
    model: str = GatewayConfig.model
    temperature: float = GatewayConfig.temperature
    max_tokens: int = GatewayConfig.max_tokens
    max_retries: int = GatewayConfig.max_retries
    max_in_flight: int = GatewayConfig.max_in_flight

    @property
    def limits(self) -> ChainLimits:
        return ChainLimits(self.max_chains, self.max_chain_len, self.include_control)

    @property
    def gateway(self) -> GatewayConfig:
        return GatewayConfig(endpoint=self.endpoint, model=self.model, temperature=self.temperature,
                             max_tokens=self.max_tokens, max_retries=self.max_retries,
                             max_in_flight=self.max_in_flight)

    def merged(self, overrides: Mapping[str, Any]) -> "PipelineConfig":
        """Copy with every non-None override applied."""
        known = {f.name for f in fields(self)}
        updates = {k: v for k, v in overrides.items() if v is not None and k in known}
        for key in ("rtl", "modules"):
            if key in updates:
                updates[key] = tuple(updates[key])
        return replace(self, **updates)

    def check(self, *, need_spec: bool = False, need_llm: bool = False) -> None:
        """Fail early on bad values and on referenced paths that do not exist."""
        if not self.rtl:
            raise ConfigError("no RTL files given")
        for p in self.rtl:
            if not Path(p).is_file():
                raise ConfigError(f"RTL file not found: {p}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.spec is not None and not Path(self.spec).is_file():
            raise ConfigError(f"design spec not found: {self.spec}")
        if self.templates is not None and not Path(self.templates).is_dir():
            raise ConfigError(f"template directory not found: {self.templates}")
        if self.max_chains < 1 or self.max_chain_len < 1:
            raise ConfigError("chain limits must be >= 1")
        if self.token_budget < 1:
            raise ConfigError("token budget must be >= 1")
        if need_spec and self.spec is None:
            raise ConfigError("a design spec (--spec) is required for this command")
        if need_llm and self.mode == "replay":
            if self.fixtures is None:
                raise ConfigError("replay mode needs --fixtures")
            if not Path(self.fixtures).is_file():
                raise ConfigError(f"fixture file not found: {self.fixtures}")

    def to_json(self) -> dict:
        data = asdict(self)
        data["rtl"] = list(self.rtl)
        data["modules"] = list(self.modules)
        return data


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s) in {path}: {', '.join(unknown)}")
    # relative paths in a config file are taken relative to the file
    base = path.parent
    for key in ("spec", "templates", "fixtures", "out"):
        if isinstance(data.get(key), str):
            data[key] = str(base / data[key])
    if "rtl" in data:
        data["rtl"] = [str(base / p) for p in data["rtl"]]
    return PipelineConfig().merged(data)
