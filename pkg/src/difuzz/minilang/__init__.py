"""The MiniProc language: parser, pretty-printer, compiler and interpreter."""

from .ast import Ast, FunctionDecl, Pos
from .emit import emit
from .interp import (DEFAULT_STEP_LIMIT, ExecOutcome, InstrumentationHooks,
                     RecordingHooks, Status, interpret)
from .parser import ParseError, link, parse, parse_program

__all__ = ["Ast", "FunctionDecl", "Pos", "emit", "DEFAULT_STEP_LIMIT",
           "ExecOutcome", "InstrumentationHooks", "RecordingHooks", "Status",
           "interpret", "ParseError", "link", "parse", "parse_program"]
