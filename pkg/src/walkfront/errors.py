"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration/input problems exit 2,
numerical failures exit 3, unreachable targets / exhausted step budgets
exit 4.
"""


class WalkfrontError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(WalkfrontError, ValueError):
    """Bad configuration file, unknown key, or inconsistent options."""


class IngestionError(WalkfrontError, ValueError):
    """Malformed raster input (header, cell count, NODATA cells)."""


class ParameterError(WalkfrontError, ValueError):
    """Operation precondition violated (bad shape params, seeds, deltas...)."""


class OutOfDomainError(WalkfrontError, ValueError):
    """A world-coordinate query fell outside the grid bounding box."""


class NumericalBlowupError(WalkfrontError, RuntimeError):
    """Non-finite values appeared during time stepping."""


class NoInterfaceError(WalkfrontError, RuntimeError):
    """Re-distancing requested but the level-set field is single-signed."""


class DegenerateMomentumError(WalkfrontError, RuntimeError):
    """Characteristic integration hit a zero momentum vector."""


class UnreachableError(WalkfrontError, RuntimeError):
    """Step budget exhausted before the stopping condition was met."""

    def __init__(self, message: str, coverage: float = float("nan")):
        super().__init__(message)
        self.coverage = coverage
