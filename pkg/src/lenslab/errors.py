"""Exception taxonomy shared by all lenslab modules.

The CLI maps these onto distinct exit codes so shell harnesses can assert
failure categories: validation/domain errors -> 2, constraint errors -> 3,
accuracy errors -> 4.
"""


class LenslabError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(LenslabError):
    """Malformed input: bad geometry, bad config, broken type invariants."""

    exit_code = 2


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class ConstraintError(LenslabError):
    """A feasibility constraint (area, admissibility) is violated."""

    exit_code = 3


class ProjectionError(ConstraintError):
    """Area projection cannot be applied without breaking ordering."""


class AccuracyError(LenslabError):
    """A numerical accuracy target could not be met or was contradicted."""

    exit_code = 4

    def __init__(self, message: str, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate
