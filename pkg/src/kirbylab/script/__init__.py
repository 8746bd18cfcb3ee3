"""The ``.kcs`` construction language: parsing, printing and replay."""
from .replay import ScriptReport, replay, replay_full
from .state import from_state_block, to_state_block
from .syntax import ASSERT_KINDS, STATEMENTS, Line, Script, Span, Statement, format_statement, parse, print_script, statement

__all__ = [
    "ASSERT_KINDS", "STATEMENTS", "Line", "Script", "ScriptReport", "Span", "Statement",
    "format_statement", "from_state_block", "parse", "print_script", "replay", "replay_full",
    "statement", "to_state_block",
]
