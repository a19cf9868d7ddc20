"""Exception types shared across the package."""


class JxsimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(JxsimError):
    """Invalid or inconsistent experiment configuration (CLI exit code 2)."""


class ResourceLimitError(JxsimError):
    """A configured size cap (photon number, transversal size, grid volume)
    would be exceeded (CLI exit code 3)."""
