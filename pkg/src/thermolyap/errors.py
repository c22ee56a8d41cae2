"""Exception types shared across the package."""


class ThermolyapError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ThermolyapError):
    """Invalid run configuration; carries the offending key."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"config key {key!r}: {message}")


class BudgetExceededError(ThermolyapError):
    """A word-enumeration request exceeds the configured word budget."""


class EmptySumError(ThermolyapError):
    """Every word in a cylinder sum carries zero weight.

    Signals that the potential vanishes identically at the requested
    length, i.e. its maximal exponent is -infinity.
    """


class DomainError(ThermolyapError):
    """A grid or evaluation point lies outside the valid domain."""


class IllPosedCombinationError(ThermolyapError):
    """A negative coefficient was applied to a -inf potential value."""


class SupportError(ThermolyapError):
    """A measure does not have the support required by the operation."""
