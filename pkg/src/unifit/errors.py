"""Exception types shared across the package."""


class UnifitError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(UnifitError, ValueError):
    """An argument is outside its documented domain (bad alpha, bad parameters...)."""


class SampleSizeError(UnifitError, ValueError):
    """The sample is too small for the requested operation."""


class DomainError(UnifitError, ValueError):
    """Data violate a statistic's domain convention (e.g. spacings need [0, 1])."""


class DegenerateWeightError(UnifitError, ValueError):
    """An uncensored observation received a zero censoring-survival weight.

    Silently dropping such a term would bias the estimator, so it is a hard
    error naming the offending observation.
    """

    def __init__(self, index: int, time: float):
        self.index = index
        self.time = time
        super().__init__(
            f"observation {index} (time {time!r}) is uncensored but has zero "
            "censoring-survival weight; the reweighted estimator is undefined"
        )


class CalibrationError(UnifitError, ValueError):
    """The requested censoring rate cannot be attained; reports the achievable range."""

    def __init__(self, message: str, achievable: tuple[float, float] | None = None):
        self.achievable = achievable
        super().__init__(message)


class UnsupportedCombinationError(UnifitError, ValueError):
    """A test method was requested for a data regime it does not support."""


class ParseError(UnifitError, ValueError):
    """A dataset file could not be parsed; carries the offending line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DegenerateDataError(UnifitError, ValueError):
    """The data admit no meaningful answer (e.g. min-max scaling of a constant column)."""
