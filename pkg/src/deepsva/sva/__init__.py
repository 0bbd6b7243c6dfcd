from .assertion import RAW, RESOLVED, SYNTAX_OK, DeepAssertion, split_statements, validate_syntax
from .emit import ValidationReport, emit_sva, sidecar_path
from .grammar import (TEMPLATE_GRAMMAR, TEMPLATE_LINE, Assertion, BoolOp, ClockRef, Cmp, Literal, Paren, Sig,
                      SigRef, SvaSyntaxError, parse_assertion, print_assertion)
from .miner import MiningParseError, compose_mining_prompt, guess_clock, mine_assertions, parse_mining_completion
from .resolve import Resolver, resolve_signals
