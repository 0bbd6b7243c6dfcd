"""Command-line entry point: ``deepsva <command> [options] RTL...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, PipelineConfig, load_config
from .diagnostics import DiagnosticError
from .pipeline import analyze_design, run_pipeline
from .sva.assertion import DeepAssertion, split_statements, validate_syntax
from .sva.emit import ValidationReport, summarize
from .sva.resolve import Resolver, resolve_signals

log = logging.getLogger("deepsva")

COMMANDS = ("analyze", "spec", "features", "mine", "pipeline", "stability", "validate")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("rtl", nargs="*", help="Verilog source files")
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--top", help="top module (default: the unique uninstantiated module)")
    common.add_argument("--spec", help="design-level specification (text or markdown)")
    common.add_argument("--templates", help="directory with prompt template overrides")
    common.add_argument("--mode", choices=("live", "record", "replay"))
    common.add_argument("--fixtures", help="JSON-lines replay fixture file")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--max-chains", type=int, dest="max_chains", help="chains kept per output port")
    common.add_argument("--max-chain-len", type=int, dest="max_chain_len", help="longest chain enumerated")
    common.add_argument("--no-control", action="store_false", dest="include_control", default=None,
                        help="leave control (if/case condition) edges out of chains")
    common.add_argument("--token-budget", type=int, dest="token_budget", help="prompt size limit in tokens")
    common.add_argument("--module", action="append", dest="modules",
                        help="restrict LLM stages to this module (repeatable)")
    common.add_argument("--endpoint", help="OpenAI-compatible API base URL")
    common.add_argument("--model")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="deepsva", description="Deep assertion mining for Verilog designs.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "analyze": "build the call graph, I/O tables, dataflow graph and signal chains",
        "spec": "generate module-level specifications",
        "features": "decompose specifications into verification features",
        "mine": "mine, validate and emit assertions from stored features",
        "pipeline": "run every stage",
        "stability": "regenerate one module spec K times and score similarity",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, parents=[common], help=text)
        if name == "stability":
            sp.add_argument("-k", type=int, default=5, help="number of regenerations (>= 2)")
    vp = sub.add_parser("validate", parents=[common], help="check an assertion file against a design")
    vp.add_argument("--sva", required=True, help="assertion file to check")
    vp.add_argument("--report", help="write the ValidationReport JSON here")
    return p


def make_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "command", "verbose", "k")}
    if not overrides.get("rtl"):
        overrides.pop("rtl", None)
    return cfg.merged(overrides)


def _print_diags(diags) -> None:
    for d in diags:
        print(d, file=sys.stderr)


def cmd_validate(cfg: PipelineConfig, sva: str, report_path: Optional[str]) -> int:
    try:
        s, diags = analyze_design(cfg.rtl, cfg.top, cfg.limits)
        text = Path(sva).read_text(encoding="utf-8")
    except (DiagnosticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    resolver = Resolver(s.db, s.tables)
    checked = []
    for stmt, tag, loc in split_statements(text, sva):
        a = DeepAssertion(stmt, "", tag, loc=loc)
        checked.append(resolve_signals(validate_syntax(a), s.db, s.tables, resolver))
    n, s_ok, resolved = summarize(checked)
    report = ValidationReport(n, s_ok, resolved, 0, resolved, tuple(checked))
    print(f"| N | S | resolved |\n|---|---|---|\n| {n} | {s_ok} | {resolved} |")
    for a in checked:
        _print_diags(a.diagnostics)
    if report_path:
        Path(report_path).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        needs_llm = args.command not in ("analyze", "validate")
        cfg.check(need_spec=args.command in ("spec", "pipeline", "stability"), need_llm=needs_llm)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command == "validate":
        return cmd_validate(cfg, args.sva, args.report)
    run = run_pipeline(cfg, args.command, k=getattr(args, "k", 5))
    report = run.write_report()
    _print_diags(d for d in run.diags if d.severity != "info" or args.verbose)
    if run.validation is not None:
        print(run.validation.render())
    print(f"run report: {report}")
    return run.exit_code


if __name__ == "__main__":
    sys.exit(main())
