"""Exception hierarchy shared across the toolkit.

Each branch maps to one CLI exit code: configuration problems exit 2,
data/format problems exit 3, feasibility failures exit 4.
"""


class AugsimError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(AugsimError):
    """Invalid configuration, arguments, or parameter domains."""

    exit_code = 2


class RegistryError(ConfigError):
    """Unknown transform name or severity outside the registered range."""


class DomainError(ConfigError):
    """Operation precondition violated (bad sizes, ranges, counts)."""


class DataError(AugsimError):
    """Unreadable, malformed, or inconsistent input data."""

    exit_code = 3


class FormatError(DataError):
    """File does not match its declared on-disk format."""


class FingerprintError(DataError):
    """Feature vectors from different extractors were mixed."""


class CoverageError(DataError):
    """A table or feature file is missing required entries."""


class FeasibilityError(AugsimError):
    """Constrained sampling could not satisfy its constraints."""

    exit_code = 4

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class CompositionError(FeasibilityError):
    """No sampled candidate is composed of the selected corruptions."""
