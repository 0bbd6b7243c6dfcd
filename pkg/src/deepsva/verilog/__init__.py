"""Verilog subset frontend: tokenize, parse, print, elaborate."""

from .ast import SourceUnit, ModuleDecl
from .elaborate import DesignDB, ElabError, InstanceNode, elaborate
from .lexer import LexError, Token, tokenize
from .parser import ParseError, parse, parse_files, parse_sources, parse_text
from .printer import print_source

__all__ = [
    "DesignDB", "ElabError", "InstanceNode", "LexError", "ModuleDecl", "ParseError",
    "SourceUnit", "Token", "elaborate", "parse", "parse_files", "parse_sources",
    "parse_text", "print_source", "tokenize",
]
