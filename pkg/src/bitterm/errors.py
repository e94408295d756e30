"""Exception hierarchy shared by every bitterm module."""
from typing import Optional


class BittermError(Exception):
    """Base class for all analyzer errors."""


class FrontendError(BittermError):
    """Syntax, type or call-graph error with a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0, filename: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename

    def render(self, filename: Optional[str] = None) -> str:
        name = filename or self.filename or "<input>"
        return f"{name}:{self.line}:{self.col}: {self.message}"

    def __str__(self) -> str:
        return self.render()


class ConfigError(BittermError):
    pass


class TemplateError(BittermError):
    pass


class UnboundVariable(BittermError, KeyError):
    pass


class SolverError(BittermError):
    pass


class SolverTimeout(BittermError):
    """The solver ran out of time. Never to be read as UNSAT."""


class BudgetExceeded(SolverTimeout):
    pass


class OracleLimitExceeded(BittermError):
    pass


class ReportError(BittermError):
    pass


class EncodingError(BittermError):
    """Inconsistent call-site or summary shapes during SSA encoding."""
