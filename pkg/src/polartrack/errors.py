"""Exception types shared across the package."""


class ConfigError(ValueError):
    """An input file, flag or parameter makes the run unusable."""


class UndefinedRatioError(ZeroDivisionError):
    """rho was requested for a group with no negatively polarized users."""
