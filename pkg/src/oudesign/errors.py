"""Exception hierarchy shared by the library, the service and the CLI.

Each error class carries the process exit code the CLI maps it to
(0 success, 2 usage/validation, 3 convergence, 4 input format).
"""


class OuDesignError(Exception):
    exit_code = 1
    error_type = "internal"


class ValidationError(OuDesignError, ValueError):
    """Bad arguments: invalid designs, parameters or indices."""

    exit_code = 2
    error_type = "validation"


class SingularityError(OuDesignError):
    """Coincident design points or a non positive definite covariance."""

    exit_code = 2
    error_type = "singularity"


class ConvergenceError(OuDesignError):
    """Iterative procedure failed to reach tolerance.

    ``best`` holds the best estimate reached before giving up.
    """

    exit_code = 3
    error_type = "convergence"

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class FormatError(OuDesignError):
    """Unparseable or inconsistent input data."""

    exit_code = 4
    error_type = "format"


class DegeneracyError(ValidationError):
    """Rank-deficient regression (e.g. trend frequency zero)."""

    error_type = "degeneracy"


class EstimationError(ConvergenceError):
    """Parameter estimation produced an inadmissible fit."""

    error_type = "estimation"
