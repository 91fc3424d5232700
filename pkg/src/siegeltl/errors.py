"""Exception types shared across the package.

The CLI maps these onto exit codes: input/validation problems exit 2,
mathematical precondition failures exit 3, resource caps exit 4.
"""


class SiegelTLError(Exception):
    """Base class for all package errors."""


class InputError(SiegelTLError, ValueError):
    """Malformed input: bad file contents, wrong shapes, out-of-range parameters."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class ValidationError(InputError):
    """An object failed a structural check (symplectic, Siegel point, automorphism...)."""


class NumericalError(SiegelTLError, ArithmeticError):
    """A numerical routine failed to produce a trustworthy answer."""


class SeriesCapError(NumericalError):
    """The cross-ratio series did not converge within its term cap."""


class LiftError(SiegelTLError):
    """An automorphism does not preserve the requested cover."""


class CapExceededError(SiegelTLError):
    """A configured resource cap (cover degree, genus, node count) was exceeded."""
