"""Exception types shared across the package."""


class MMSpecError(Exception):
    """Base class for package errors."""


class ParseError(MMSpecError, ValueError):
    """Malformed text input (Hamiltonian, circuit, edge list)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionError(MMSpecError, ValueError):
    """Dense representation requested beyond the supported qubit count."""


class NumericalError(MMSpecError, RuntimeError):
    """An eigensolver or other numerical routine failed."""


class CalibrationError(MMSpecError, KeyError):
    """A gate has no matching calibration entry."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class EulerInstabilityWarning(RuntimeWarning):
    """Norm drift of the truncated Euler propagator exceeded the threshold."""
