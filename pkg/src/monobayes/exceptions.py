"""Exception hierarchy.

Everything derives from ``ValueError`` so callers that only care about bad
input can catch that.
"""


class MonobayesError(ValueError):
    pass


class DomainError(MonobayesError):
    """An argument lies outside the domain of the operation."""


class ModelError(MonobayesError):
    """A qualitative model failed validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid model: " + "; ".join(self.violations))


class DataError(MonobayesError):
    """A dataset cell is missing or out of range."""


class ParseError(MonobayesError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class InferenceError(MonobayesError):
    pass


class TrainingError(MonobayesError):
    pass


class SpecError(MonobayesError):
    """An experiment specification is inconsistent with its data."""
