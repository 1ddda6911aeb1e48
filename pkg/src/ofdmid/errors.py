"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a configuration object or file is invalid.

    The CLI maps this to exit code 1; any other failure maps to 2.
    """
