"""Exception hierarchy shared by all modules."""


class DarwinismError(Exception):
    """Base class for all errors raised by this package."""


class SpecValidationError(DarwinismError, ValueError):
    """An input violates its contract (range, shape, feasibility)."""


class DeficitUnreachableError(DarwinismError):
    """No fragment up to the whole environment reaches the information target."""


class OracleCapError(DarwinismError, ValueError):
    """A dense-state operation exceeds the configured qubit cap."""
