"""Exception types shared across the package."""


class CarlemanError(Exception):
    """Base class for package errors."""


class ParameterError(CarlemanError, ValueError):
    """An exponent tuple violates one of the admissibility hypotheses.

    The message names the first violated rule, e.g. ``"q < p in part (a)"``.
    """

    def __init__(self, rule: str):
        super().__init__(rule)
        self.rule = rule


class TiltSafetyError(CarlemanError, ValueError):
    """An exponential tilt would destroy the compact-support surrogate."""


class ConfigError(CarlemanError, ValueError):
    """An experiment configuration is malformed (unknown or missing keys)."""
