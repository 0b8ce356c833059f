"""Exception hierarchy shared across the package.

CLI exit-code mapping: usage errors exit 1, :class:`DataError` (and
subclasses) exit 2, :class:`ResourceBudgetError` exits 3.
"""


class NiphError(Exception):
    """Base class for all package errors."""


class DataError(NiphError):
    """Invalid or degenerate input data."""


class InvalidProbeError(DataError):
    """Probe direction is not a unit vector or the factor is not positive."""


class InvalidWeightingError(DataError):
    """Requested death-distribution weighting is not applicable."""


class DegenerateDistributionError(DataError):
    """A sample with zero variance where spread is required (e.g. KDE bandwidth)."""


class ResourceBudgetError(NiphError):
    """A configured resource cap (point count, simplex budget) was exceeded."""


class PipelineError(NiphError):
    """A probe computation failed mid-run.

    Carries the per-probe results completed before the failure so callers
    can inspect partial progress.
    """

    def __init__(self, message, completed=None):
        super().__init__(message)
        self.completed = list(completed) if completed is not None else []
