"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument is outside the domain of the function it was passed to."""


class NumericFailure(RuntimeError):
    """A quadrature or series evaluation did not converge.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (interval, estimated error, number of evaluations).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConfigError(ValueError):
    """A configuration file or flag could not be turned into a valid record."""

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key
