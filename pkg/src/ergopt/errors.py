"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, PreconditionError -> 3,
VerificationError -> 1.
"""


class ErgoptError(Exception):
    """Base class for all package errors."""


class ConfigError(ErgoptError):
    """Malformed configuration input; message carries a field path."""


class PreconditionError(ErgoptError):
    """An operation was called outside its stated preconditions."""


class VerificationError(ErgoptError):
    """An internal cross-check or certificate failed."""


class ExtendedArithmeticError(ErgoptError):
    """Undefined extended-real arithmetic, e.g. (+inf) + (-inf)."""
