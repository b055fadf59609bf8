"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: configuration errors exit 2,
numerical errors exit 3, I/O errors exit 4.
"""


class CornerScatterError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(CornerScatterError):
    """Invalid or inconsistent run/problem configuration (exit code 2)."""


class ValidationError(CornerScatterError):
    """Input data violates a documented invariant (bad matrix field, etc.)."""


class NumericalError(CornerScatterError):
    """A numerical procedure failed to converge or produced garbage (exit 3)."""


class RangeError(ValueError, CornerScatterError):
    """Argument outside the documented supported range."""


class DomainEvaluationError(ValueError, CornerScatterError):
    """Evaluation requested at a point where the function is undefined."""


class CornerAmbiguityError(CornerScatterError):
    """Normal/frame query at a corner where the quantity is multivalued.

    Callers should consult ``corner_points`` of the domain instead.
    """
