"""
Exception hierarchy for the OMV engine.

Every error raised by the core modules derives from :class:`OmvError` and from
the builtin exception that best describes it, so callers may catch either.
"""


class OmvError(Exception):
    """Base class for all engine errors."""


class ContractViolation(OmvError, ValueError):
    """Operands do not satisfy an operation's precondition (length or dimension mismatch)."""


class ConfigurationError(OmvError, ValueError):
    """Parameters violate the constraints of the data structure (e.g. ``Z > n / log2 n``)."""


class EmptySetError(OmvError, LookupError):
    """A sample was requested from an empty set."""


class InvariantViolation(OmvError, RuntimeError):
    """An internal invariant was found broken. Reaching this indicates a bug."""


class ScaleError(OmvError, ValueError):
    """An exhaustive search was requested above its configured size limit."""


class InputError(OmvError, ValueError):
    """Malformed user input: fixture text, pattern length or symbol range."""
