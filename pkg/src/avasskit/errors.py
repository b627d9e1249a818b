"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations

from dataclasses import dataclass


class AvassKitError(Exception):
    """Base class for all errors raised on purpose by this package."""


@dataclass(frozen=True)
class SourceSpan:
    """Location of a piece of input text: 1-based line and column, 0-based byte offset."""

    line: int
    column: int
    offset: int

    def __str__(self) -> str:
        return f"line {self.line}, col {self.column}"


class ParseError(AvassKitError):
    """Malformed machine description, formula, or configuration text."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span is not None else message)


class MachineError(AvassKitError):
    """Structurally invalid machine: unknown states, dimension mismatch, bad payload."""


class FlavorError(AvassKitError):
    """An operation was applied to a machine flavor it is not defined for."""


class ArityError(AvassKitError):
    """A formula has more variables than the exact solver is willing to handle."""


class GuardedMachineError(AvassKitError):
    """A check that reads transition domains off the bare updates was handed a
    machine with explicit guard clauses.  Deliberately distinct from
    FlavorError: the machine is the right flavor, but the analysis would be
    unsound on it."""


class BudgetExceededError(AvassKitError):
    """An internal enumeration outgrew its budget.

    This is reported as a defect of the analysis run, never as a yes/no answer:
    the CLI maps it to its own exit code and callers are expected to re-run with
    a bigger budget or a smaller input.
    """
