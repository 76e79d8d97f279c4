"""Exception types shared across the library."""


class ConfigError(ValueError):
    """Invalid configuration or mismatched dimensions detected before/at setup."""


class NumericalError(FloatingPointError):
    """A non-finite value appeared where finite arithmetic is required."""


class ContractError(RuntimeError):
    """An API was used outside its stated contract (e.g. stepping a terminal state)."""
