"""Stage orchestration with persisted artifacts and a run report.

Every stage writes its outputs under the run's output directory and records
them in an artifact index (paths relative to that directory). Wall-clock data
lives only in the report's ``timestamps`` field.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import SCHEMA_VERSION, __version__
from .config import ConfigError, PipelineConfig
from .diagnostics import Diagnostic, DiagnosticError, error, has_errors, info, warning
from .llm.gateway import Gateway, GatewayError, ReplayStore
from .llm.templates import TemplateError, load_template
from .specgen import (FEATURE_TEMPLATE, SPEC_TEMPLATE, ContextOverflow, FeatureParseError, ModuleSpec,
                      SpecParseError, VerificationFeature, chains_touching, compose_feature_prompt,
                      compose_spec_prompt, features_to_json, generate_module_spec, hygiene_violations,
                      module_body_lines, parse_features, stability_run)
from .structure.chains import ChainSet, SignalChain, chains_to_json, extract_signal_chains, simplify_chains
from .structure.dataflow import DataflowGraph, build_dataflow
from .structure.dot import export_dot
from .structure.iotable import IoTable, build_io_tables, io_tables_to_json
from .structure.mcg import ModuleCallGraph, build_mcg
from .sva.assertion import DeepAssertion, validate_syntax
from .sva.emit import ValidationReport, emit_sva, sidecar_path
from .sva.miner import MINING_TEMPLATE, MiningParseError, compose_mining_prompt, guess_clock, parse_mining_completion
from .sva.resolve import Resolver, resolve_signals
from .verilog.ast import SourceUnit
from .verilog.elaborate import DesignDB, elaborate
from .verilog.parser import parse_sources

log = logging.getLogger(__name__)

STAGES = ("analyze", "spec", "features", "mine", "validate")
STAGE_ERRORS = (DiagnosticError, GatewayError, ContextOverflow, SpecParseError, FeatureParseError,
                MiningParseError, TemplateError, ConfigError, ValueError, OSError)


class StageFailure(Exception):
    def __init__(self, stage: str, diagnostic: Diagnostic):
        self.stage = stage
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


class _ModuleFailure(Exception):
    def __init__(self, module: str, cause: Exception):
        self.module = module
        self.cause = cause
        super().__init__(f"module '{module}': {cause}")


@dataclass(frozen=True)
class Structure:
    unit: SourceUnit
    db: DesignDB
    mcg: ModuleCallGraph
    tables: dict
    dataflow: DataflowGraph
    chains: ChainSet
    simplified: list

    def table(self, module: str) -> IoTable:
        return self.tables[module]

    def chains_for(self, module: str) -> list[SignalChain]:
        return chains_touching(module, self.simplified, self.db)


def read_sources(paths: Sequence[str]) -> list[tuple[str, str]]:
    return [(str(p), Path(p).read_text(encoding="utf-8")) for p in paths]


def analyze_design(paths: Sequence[str], top: Optional[str], limits) -> tuple[Structure, list[Diagnostic]]:
    """Parse, elaborate and extract every structural artifact (no file output)."""
    unit = parse_sources(read_sources(paths))
    db = elaborate(unit, top)
    diags = list(db.diagnostics)
    mcg = build_mcg(db)
    tables, tdiags = build_io_tables(db)
    diags.extend(tdiags)
    df = build_dataflow(db)
    diags.extend(df.diagnostics)
    chains = extract_signal_chains(df, limits)
    for sink in sorted(chains.truncated):
        diags.append(info(f"chain enumeration for '{sink}' hit a limit; list truncated"))
    simplified = simplify_chains(chains, df.ports)
    return Structure(unit, db, mcg, tables, df, chains, simplified), diags


class Run:
    def __init__(self, cfg: PipelineConfig, command: str, gateway: Optional[Gateway] = None,
                 clock: Callable[[], float] = time.perf_counter):
        self.cfg = cfg
        self.command = command
        self.out = Path(cfg.out)
        self.diags: list[Diagnostic] = []
        self.design_artifacts: dict[str, str] = {}
        self.module_artifacts: dict[str, dict[str, str]] = {}
        self.stages: list[dict] = []
        self.stage_seconds: dict[str, float] = {}
        self.validation: Optional[ValidationReport] = None
        self.started = datetime.now(timezone.utc).isoformat()
        self._clock = clock
        self._gateway = gateway
        self.structure: Optional[Structure] = None

    # -- plumbing --

    @property
    def gateway(self) -> Gateway:
        if self._gateway is None:
            store = ReplayStore(self.cfg.mode, self.cfg.fixtures)
            self._gateway = Gateway(self.cfg.gateway, store)
        return self._gateway

    @contextmanager
    def stage(self, name: str):
        t0 = self._clock()
        log.info("stage %s", name)
        try:
            yield
        except _ModuleFailure as exc:
            self._fail(name, f"module '{exc.module}': {_describe(exc.cause)}")
        except StageFailure:
            raise
        except STAGE_ERRORS as exc:
            self._fail(name, _describe(exc))
        finally:
            self.stage_seconds[name] = round(self._clock() - t0, 6)
        self.stages.append({"name": name, "status": "ok"})

    def _fail(self, name: str, message: str):
        d = error(f"stage '{name}' failed: {message}")
        self.diags.append(d)
        self.stages.append({"name": name, "status": "failed"})
        raise StageFailure(name, d)

    def write(self, rel: str, content: str | dict, module: Optional[str] = None, key: Optional[str] = None) -> Path:
        path = self.out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        text = content if isinstance(content, str) else json.dumps(content, indent=2, sort_keys=True) + "\n"
        path.write_text(text, encoding="utf-8", newline="\n")
        name = key or Path(rel).name
        if module is None:
            self.design_artifacts[name] = rel
        else:
            self.module_artifacts.setdefault(module, {})[name] = rel
        return path

    def modules(self) -> list[str]:
        reachable = self.structure.db.reachable_modules
        if not self.cfg.modules:
            return reachable
        unknown = [m for m in self.cfg.modules if m not in reachable]
        if unknown:
            raise ConfigError(f"module(s) not in the elaborated design: {', '.join(unknown)}")
        return sorted(set(self.cfg.modules))

    def per_module(self, fn, modules: Sequence[str]) -> list:
        """Apply ``fn`` to every module, concurrently, returning results in module order."""
        def guarded(m):
            try:
                return fn(m)
            except STAGE_ERRORS as exc:
                raise _ModuleFailure(m, exc) from exc
        with ThreadPoolExecutor(max_workers=max(1, self.cfg.max_in_flight)) as ex:
            return list(ex.map(guarded, modules))

    def template_dir(self):
        return self.cfg.templates

    # -- stages --

    def analyze(self) -> Structure:
        with self.stage("analyze"):
            s, diags = analyze_design(self.cfg.rtl, self.cfg.top, self.cfg.limits)
            self.structure = s
            self.diags.extend(diags)
            self.write("mcg.json", s.mcg.to_json(), key="mcg")
            self.write("io_tables.json", io_tables_to_json(s.tables), key="io_tables")
            self.write("dataflow.json", s.dataflow.to_json(), key="dataflow")
            self.write("chains.json", chains_to_json(s.chains, s.simplified), key="chains")
            self.write("mcg.dot", export_dot(s.mcg), key="mcg_dot")
            self.write("dataflow.dot", export_dot(s.dataflow), key="dataflow_dot")
        return s

    def ensure_llm(self, stage: str) -> None:
        """Abort before ``stage`` when live/record mode lacks credentials."""
        try:
            self.gateway.check_ready()
        except GatewayError as exc:
            self._fail(stage, _describe(exc))

    def spec_prompt(self, module: str, design_spec: str):
        s = self.structure
        template = load_template(SPEC_TEMPLATE, self.template_dir())
        return compose_spec_prompt(module, s.db, s.mcg, s.table(module), s.simplified, design_spec, template,
                                   self.cfg.token_budget, self.cfg.temperature, self.cfg.max_tokens)

    def specs(self) -> dict[str, ModuleSpec]:
        self.ensure_llm("spec")
        with self.stage("spec"):
            design_spec = Path(self.cfg.spec).read_text(encoding="utf-8")
            modules = self.modules()

            def one(m):
                prompt = self.spec_prompt(m, design_spec)
                leaks = hygiene_violations(prompt, module_body_lines(self.structure.db, m, self.structure.unit.files))
                spec = generate_module_spec(prompt, self.gateway, m, self.structure.table(m))
                return prompt, leaks, spec

            results = self.per_module(one, modules)
            out = {}
            for m, (prompt, leaks, spec) in zip(modules, results):
                for line in leaks:
                    self.diags.append(error(f"{m}: spec prompt contains module body text: {line!r}"))
                for note in prompt.notes:
                    self.diags.append(info(f"{m}: context budget: {note}"))
                if spec.degraded_parse:
                    self.diags.append(warning(f"{m}: specification had no section labels; kept as free text"))
                self.write(f"prompts/{m}.spec.txt", prompt.text, m, "spec_prompt")
                data = spec.to_json()
                data["prompt_notes"] = list(prompt.notes)
                self.write(f"specs/{m}.json", data, m, "spec")
                out[m] = spec
        return out

    def load_specs(self) -> dict[str, ModuleSpec]:
        out = {}
        for m in self.modules():
            path = self.out / "specs" / f"{m}.json"
            if not path.exists():
                raise ConfigError(f"missing {path}; run the spec stage first")
            out[m] = ModuleSpec.from_json(json.loads(path.read_text(encoding="utf-8")))
            self.module_artifacts.setdefault(m, {})["spec"] = f"specs/{m}.json"
        return out

    def features(self, specs: Optional[dict[str, ModuleSpec]] = None) -> dict[str, list[VerificationFeature]]:
        self.ensure_llm("features")
        with self.stage("features"):
            if specs is None:
                specs = self.load_specs()
            template = load_template(FEATURE_TEMPLATE, self.template_dir())
            modules = sorted(specs)

            def one(m):
                table = self.structure.table(m)
                prompt = compose_feature_prompt(specs[m], table, template, self.cfg.temperature, self.cfg.max_tokens)
                completion = self.gateway.complete(prompt)
                return prompt, parse_features(completion.text, m, table)

            results = self.per_module(one, modules)
            out = {}
            for m, (prompt, (features, diags)) in zip(modules, results):
                self.diags.extend(diags)
                self.write(f"prompts/{m}.features.txt", prompt.text, m, "features_prompt")
                data = features_to_json(m, features, diags)
                data["provenance"] = {"template_id": prompt.template_id, "fingerprint": prompt.fingerprint}
                self.write(f"features/{m}.json", data, m, "features")
                out[m] = features
        return out

    def load_features(self) -> dict[str, list[VerificationFeature]]:
        out = {}
        for m in self.modules():
            path = self.out / "features" / f"{m}.json"
            if not path.exists():
                raise ConfigError(f"missing {path}; run the features stage first")
            data = json.loads(path.read_text(encoding="utf-8"))
            out[m] = [VerificationFeature.from_json(f) for f in data["features"]]
            self.module_artifacts.setdefault(m, {})["features"] = f"features/{m}.json"
        return out

    def mine(self, features: Optional[dict[str, list[VerificationFeature]]] = None) -> list[DeepAssertion]:
        self.ensure_llm("mine")
        with self.stage("mine"):
            if features is None:
                features = self.load_features()
            template = load_template(MINING_TEMPLATE, self.template_dir())
            s = self.structure
            top_table = s.tables.get(s.db.top)
            modules = []
            for m in sorted(features):
                if features[m]:
                    modules.append(m)
                else:
                    self.diags.append(warning(f"{m}: no verification features; nothing to mine"))

            def one(m):
                table = s.table(m)
                clock = guess_clock(table, top_table)
                prompt = compose_mining_prompt(features[m], s.chains_for(m), table, clock or "clk", template,
                                               self.cfg.token_budget, self.cfg.temperature, self.cfg.max_tokens)
                completion = self.gateway.complete(prompt)
                # diagnostics point into the saved completion text
                raw_path = f"mined/{m}.completion.txt"
                mined, diags = parse_mining_completion(completion.text, m, features[m], raw_path)
                return clock, prompt, completion.text, mined, diags

            results = self.per_module(one, modules)
            out: list[DeepAssertion] = []
            for m, (clock, prompt, raw, mined, diags) in zip(modules, results):
                if clock is None:
                    self.diags.append(warning(f"{m}: no clock-like input port found; assumed 'clk'"))
                for note in prompt.notes:
                    self.diags.append(info(f"{m}: context budget: {note}"))
                self.diags.extend(diags)
                self.write(f"prompts/{m}.mining.txt", prompt.text, m, "mining_prompt")
                self.write(f"mined/{m}.completion.txt", raw, m, "mining_completion")
                self.write(f"mined/{m}.json", {
                    "schema_version": SCHEMA_VERSION,
                    "kind": "mined_assertions",
                    "module": m,
                    "provenance": {"template_id": prompt.template_id, "fingerprint": prompt.fingerprint},
                    "assertions": [{"feature": a.feature, "raw": a.raw, "line": a.loc.line} for a in mined],
                }, m, "mined")
                out.extend(mined)
        return out

    def validate(self, mined: Sequence[DeepAssertion]) -> ValidationReport:
        with self.stage("validate"):
            s = self.structure
            resolver = Resolver(s.db, s.tables)
            checked = [resolve_signals(validate_syntax(a), s.db, s.tables, resolver) for a in mined]
            report = emit_sva(checked, self.out / "assertions.sva", s.db.top)
            self.design_artifacts["assertions"] = "assertions.sva"
            self.design_artifacts["rejected"] = sidecar_path("assertions.sva").as_posix()
            self.write("validation_report.json", report.to_json(), key="validation_report")
            self.validation = report
        return report

    def stability(self, k: int) -> dict:
        self.ensure_llm("stability")
        with self.stage("stability"):
            modules = self.modules()
            if len(modules) != 1 or not self.cfg.modules:
                raise ConfigError("stability needs exactly one --module")
            m = modules[0]
            design_spec = Path(self.cfg.spec).read_text(encoding="utf-8")
            prompt = self.spec_prompt(m, design_spec)
            rep = stability_run(m, prompt, k, self.gateway, self.structure.table(m))
            self.write(f"stability/{m}.json", rep.to_json(), m, "stability")
        return rep

    # -- report --

    @property
    def exit_code(self) -> int:
        return 1 if has_errors(self.diags) else 0

    def report(self) -> dict:
        """The run report; everything except ``timestamps`` is deterministic."""
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "run_report",
            "tool_version": __version__,
            "command": self.command,
            "config": self.cfg.to_json(),
            "top": self.structure.db.top if self.structure else None,
            "stages": self.stages,
            "diagnostics": [d.to_json() for d in self.diags],
            "artifacts": {
                "design": dict(sorted(self.design_artifacts.items())),
                "modules": {m: dict(sorted(a.items())) for m, a in sorted(self.module_artifacts.items())},
            },
            "validation": None if self.validation is None else {
                k: v for k, v in self.validation.to_json().items() if k != "verdicts"
            } | {"report": "validation_report.json"},
            "exit_code": self.exit_code,
            "timestamps": {
                "started": self.started,
                "finished": datetime.now(timezone.utc).isoformat(),
                "stage_seconds": dict(self.stage_seconds),
            },
        }

    def write_report(self) -> Path:
        path = self.out / "run_report.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.report(), indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
        return path


def _describe(exc: Exception) -> str:
    if isinstance(exc, DiagnosticError):
        return str(exc.diagnostic)
    if isinstance(exc, GatewayError) and exc.fingerprint:
        return f"{exc} [fingerprint {exc.fingerprint}, template {exc.template_id}]"
    return str(exc) or type(exc).__name__


def run_pipeline(cfg: PipelineConfig, command: str = "pipeline", gateway: Optional[Gateway] = None,
                 k: int = 5) -> Run:
    """Run the stages behind ``command``; stage failures are recorded, not raised.

    ``spec``, ``features`` and ``mine`` each run one LLM stage, reading the
    previous stage's artifacts from the output directory; ``mine`` also
    validates and emits. ``pipeline`` runs everything.
    """
    run = Run(cfg, command, gateway)
    try:
        run.analyze()
        if command == "stability":
            run.stability(k)
        elif command == "spec":
            run.specs()
        elif command == "features":
            run.features()
        elif command == "mine":
            run.validate(run.mine())
        elif command == "pipeline":
            run.validate(run.mine(run.features(run.specs())))
    except StageFailure as exc:
        log.error("%s", exc)
    return run
