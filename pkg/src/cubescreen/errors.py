"""Exception types shared across the package."""


class CubescreenError(Exception):
    """Base class for all package errors."""


class SchemaMismatch(CubescreenError):
    """Input header or record layout does not match the declared schema."""


class ConfigError(CubescreenError):
    """Invalid configuration value."""


class BuildError(CubescreenError):
    """Event records cannot be indexed (e.g. date outside the calendar)."""


class QueryError(CubescreenError):
    """Malformed conjunction or window."""


class StatError(CubescreenError):
    """Contingency table unusable for the requested test."""


class EmptyScreen(CubescreenError):
    """No admissible window exists for the requested screening frontier."""
