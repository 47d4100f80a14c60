"""Exception hierarchy shared by the numerical core and the CLI."""
from __future__ import annotations

EXIT_OK = 0
EXIT_TEST_FAILURE = 1
EXIT_EXECUTION_ERROR = 2


class CanningsError(Exception):
    """Base class for every error raised on purpose by canningskit."""


class ConfigurationError(CanningsError):
    """Invalid model parameters, inconsistent regime metadata or a bad run config."""


class DomainError(CanningsError):
    """Argument outside the mathematical domain of an operation."""


class DivergenceError(CanningsError):
    """A moment or integral that would be infinite was requested."""


class SolverError(CanningsError):
    """Root finding failed (no sign change in the bracket)."""


class UsageError(CanningsError):
    """Malformed call: mismatched sizes, unsupported orders, bad query strings."""


class QuadratureError(CanningsError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        detail = ", ".join(f"{k}={v}" for k, v in sorted(self.diagnostics.items()))
        return f"{base} ({detail})"
