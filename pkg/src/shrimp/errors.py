"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its admissible range."""


class DataError(ValueError):
    """Input arrays are malformed (non-finite, asymmetric, zero columns, ...)."""


class RegimeError(ValueError):
    """A formula was evaluated outside the regime it is defined for."""
