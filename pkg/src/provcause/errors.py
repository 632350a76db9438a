"""Exception hierarchy shared by all provcause modules."""

from __future__ import annotations


class ProvCauseError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ProvCauseError):
    """Malformed input text; carries a 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class SchemaError(ProvCauseError):
    """Well-formed JSON that does not follow the expected schema."""


class DomainError(ProvCauseError):
    """A value is outside the finite domain, or a builtin does not support it."""


class FunctionSpecError(ProvCauseError):
    """Invalid builtin name, arity, or non-total table."""


class EvaluationError(ProvCauseError):
    """Evaluation requested with inputs that do not match the graph."""


class ModelError(ProvCauseError):
    """Ill-formed causal model (unknown parent, cycle, duplicate name)."""


class InterventionError(ProvCauseError):
    """Intervention on a name that is not an endogenous variable."""


class CauseQueryError(ProvCauseError):
    """Cause query violating its preconditions."""


class ProgramError(ProvCauseError):
    """Static error in a straight-line program (use-before-assign, bad guard)."""


class SemanticsRefused(ProvCauseError):
    """A provenance semantics is undefined for the given program."""


class BudgetExceeded(ProvCauseError):
    """Exhaustive check refused because the search space exceeds the budget."""


class AuditError(ProvCauseError):
    """Audit preconditions violated (inconsistent labels, bad bound)."""
