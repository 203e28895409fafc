"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: bad input -> 2, blown resource or size
bound -> 3.  A failed identity check is not an exception (the checker returns
a report); exceptions mean the computation itself could not be carried out.
"""


class RepconfError(Exception):
    """Base class for all package-specific errors."""


class InputError(RepconfError, ValueError):
    """Malformed arguments, files, or structurally invalid data."""


class SizeBoundError(RepconfError):
    """A configured enumeration bound or resource limit was exceeded."""


class NonPolynomialCountError(RepconfError):
    """A family of counts failed the polynomial-in-q consistency checks
    (held-out sample mismatch, or non-exact division)."""


class UnsupportedError(RepconfError):
    """The requested computation is outside the implemented regime (e.g. a
    weak stability condition where a strict one is required)."""
