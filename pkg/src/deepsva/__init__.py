"""Static-analysis guided deep assertion mining for hierarchical Verilog designs."""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
