class LinnikError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LinnikError, ValueError):
    """An argument lies outside the domain of a function or law."""


class SeriesConvergenceError(LinnikError):
    def __init__(self, message: str, partial_sum: float, bound: float):
        super().__init__(f"{message} (partial sum {partial_sum!r}, tail bound {bound!r})")
        self.partial_sum = partial_sum
        self.bound = bound


class InsufficientDataError(LinnikError, ValueError):
    """Too few usable observations after filtering."""


class NonPositiveDataError(LinnikError, ValueError):
    """A logarithm was requested of a non-positive observation."""


class DegenerateMomentsError(LinnikError, ValueError):
    """Sample log-moments admit no parameter value (e.g. 12 var <= pi^2 for gL)."""


class IncompatibleMethodError(LinnikError):
    """An inference method was requested for a fit it does not support."""


class BootstrapFailureError(LinnikError):
    def __init__(self, failures: int, replicates: int, limit: float):
        super().__init__(
            f"{failures} of {replicates} bootstrap replicates failed "
            f"(limit {limit:.0%})"
        )
        self.failures = failures
        self.replicates = replicates
        self.limit = limit


class DataFormatError(LinnikError, ValueError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column '{column}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row = row
        self.column = column


class EmptyResultError(LinnikError, ValueError):
    """A transform produced no values."""
