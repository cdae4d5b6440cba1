"""Diagnostics shared by every pipeline stage.

All errors raised while processing a specification carry a source span so the
CLI can print ``file:line:col`` style messages and exit with code 1.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Half-open region of the source text, 1-based line/column."""

    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class FscError(Exception):
    """Base class for all diagnostics."""

    def __init__(self, message: str, span: Span | None = None):
        self.message = message
        self.span = span
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.span is not None:
            return f"{self.span}: {self.message}"
        return self.message


class LexError(FscError):
    pass


class ParseError(FscError):
    pass


class ResolveError(FscError):
    """Name, type, arity or structural error while building the flat model."""


class EvalError(FscError):
    """Raised when expression evaluation leaves a declared domain."""


class StepError(FscError):
    """An update drove a variable out of its domain; names variable and edge."""


class BudgetError(FscError):
    """Explicit state budget exceeded; the symbolic engine is the way out."""


class SynthesisEmpty(FscError):
    """Synthesis removed every initial state; reported, never silent."""
