"""Textual DSL for named processes: parsing, checking, elaboration,
pretty-printing."""

from mcsp.lang.check import Diagnostic, check_env, choices_compatible, infer
from mcsp.lang.elaborate import ElaborationError, elaborate, elaborate_checked
from mcsp.lang.parser import CspSyntaxError, parse, parse_proc
from mcsp.lang.syntax import (
    AddTick,
    Ast,
    Bind,
    Definition,
    Env,
    ExtChoice,
    Fmap,
    IntChoice,
    Prefix,
    Ref,
    Skip,
    Stop,
    Term,
    pretty_ast,
    pretty_env,
)

__all__ = [
    "AddTick", "Ast", "Bind", "CspSyntaxError", "Definition", "Diagnostic",
    "ElaborationError", "Env", "ExtChoice", "Fmap", "IntChoice", "Prefix",
    "Ref", "Skip", "Stop", "Term", "check_env", "choices_compatible",
    "elaborate", "elaborate_checked", "infer", "parse", "parse_proc",
    "pretty_ast", "pretty_env",
]
