"""Exception types shared across the package."""


class StlLabError(Exception):
    """Base class for all stl-lab errors."""


class ValidationError(StlLabError, ValueError):
    """Invalid input value, field, or shape. Message names the offending item."""


class ConfigurationError(StlLabError, ValueError):
    """Inconsistent run configuration (e.g. a frequency band with no grid points)."""


class ParseError(StlLabError, ValueError):
    """Malformed file content. Message carries line/field diagnostics."""


class NumericalError(StlLabError, ArithmeticError):
    """Numerical failure (non-convergence, singular solve). Carries diagnostics."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = dict(diagnostics)
