"""Exception types shared across the package."""


class PsvarError(Exception):
    """Base class for all errors raised by this package."""


class MalformedTermError(PsvarError):
    """A term references a variable outside the given assignment."""


class SignatureMismatchError(PsvarError):
    """Two algebras that must share a signature do not."""


class CarrierMismatchError(PsvarError):
    """Partition or congruence carrier size does not match the algebra."""


class ArityMismatchError(PsvarError):
    """Clone composition called with inconsistent arities."""


class NotACongruenceError(PsvarError):
    """A partition fails compatibility with some operation.

    Carries a violating (symbol, args, args') witness when available.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceLimitError(PsvarError):
    """A construction exceeded its configured size cap."""


class BoundExceededError(PsvarError):
    """A query needs an arity beyond the bounds of a truncated filter.

    This is an explicit refusal, never a membership verdict.
    """


class AlgebraFormatError(PsvarError):
    """An algebra file violates the JSON schema.

    ``path`` is the offending file, ``json_path`` a JSONPath-style locator.
    """

    def __init__(self, message, path=None, json_path=None):
        super().__init__(message)
        self.path = path
        self.json_path = json_path
