"""Exception types shared across the package."""


class AmcError(Exception):
    """Base class for every error this package raises deliberately."""


class FormulaError(AmcError):
    """Malformed formula: bad syntax, unbound variable, or duplicate binder."""


class ParseError(FormulaError):
    """Syntax error carrying the 1-based line and column of the offence."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ModelError(AmcError):
    """Invalid model data, or a model that cannot serve the requested check."""


class CheckTimeout(AmcError):
    """A cooperative deadline expired while a computation was running."""
