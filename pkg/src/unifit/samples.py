"""Sample containers, the empirical distribution function, and normal quantiles.

All containers validate on construction and are immutable afterwards, so
every operation downstream can assume clean inputs and stay a pure function.
"""

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ArgumentError, SampleSizeError

__all__ = [
    "Sample",
    "OrderedSample",
    "CensoredObservation",
    "CensoredSample",
    "sort_sample",
    "edf",
    "normal_quantile",
    "normal_cdf",
]


def _as_locked_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Sample:
    """A batch of real-valued observations, in arrival order.

    Values must be finite; emptiness is rejected here, while minimum-size
    requirements (e.g. n >= 2 for pairwise estimators) are enforced by the
    operations that need them.
    """

    values: np.ndarray

    def __init__(self, values: Iterable[float]):
        arr = _as_locked_array(values)
        if arr.ndim != 1 or arr.size == 0:
            raise ArgumentError("sample must be a nonempty 1-d collection of numbers")
        if not np.all(np.isfinite(arr)):
            raise ArgumentError("sample values must be finite (no NaN or infinities)")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class OrderedSample:
    """A sample sorted ascending. Build one with :func:`sort_sample`."""

    values: np.ndarray
    n: int = field(init=False)

    def __init__(self, values: Iterable[float]):
        arr = _as_locked_array(values)
        if arr.ndim != 1 or arr.size == 0:
            raise ArgumentError("sample must be a nonempty 1-d collection of numbers")
        if not np.all(np.isfinite(arr)):
            raise ArgumentError("sample values must be finite (no NaN or infinities)")
        if arr.size > 1 and np.any(np.diff(arr) < 0):
            raise ArgumentError("OrderedSample values must be ascending")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "n", int(arr.size))


@dataclass(frozen=True)
class CensoredObservation:
    """One follow-up record: observed time and event indicator (1=event, 0=censored)."""

    time: float
    status: int

    def __post_init__(self):
        if not np.isfinite(self.time) or self.time < 0:
            raise ArgumentError(f"follow-up time must be finite and >= 0, got {self.time!r}")
        if self.status not in (0, 1):
            raise ArgumentError(f"status must be 0 or 1, got {self.status!r}")


@dataclass(frozen=True)
class CensoredSample:
    """A right-censored sample stored as parallel time/status arrays.

    Construction checks each record; the "at least two events" requirement of
    the pairwise estimator is enforced by those estimators, so that purely
    censored samples can still be handed to the censoring-survival estimator.
    """

    times: np.ndarray
    status: np.ndarray

    def __init__(self, observations: Iterable[CensoredObservation]):
        obs = list(observations)
        if not obs:
            raise ArgumentError("censored sample must be nonempty")
        times = _as_locked_array([o.time for o in obs])
        status = _as_locked_array([o.status for o in obs], dtype=np.int64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "status", status)

    @classmethod
    def from_arrays(cls, times: Sequence[float], status: Sequence[int]) -> "CensoredSample":
        times = np.asarray(times, dtype=float)
        status = np.asarray(status)
        if times.shape != status.shape or times.ndim != 1:
            raise ArgumentError("times and status must be 1-d arrays of equal length")
        return cls(CensoredObservation(float(t), int(d)) for t, d in zip(times, status))

    @property
    def observations(self) -> list[CensoredObservation]:
        return [
            CensoredObservation(float(t), int(d))
            for t, d in zip(self.times, self.status)
        ]

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def n_events(self) -> int:
        return int(self.status.sum())

    def require_events(self, k: int = 2) -> None:
        if self.n_events < k:
            raise SampleSizeError(
                f"need at least {k} uncensored observations, got {self.n_events}"
            )


def sort_sample(s: Sample) -> OrderedSample:
    """Ascending copy of a sample; stable, so tied values keep their order."""
    return OrderedSample(np.sort(s.values, kind="stable"))


def edf(s: OrderedSample, t: float) -> float:
    """Empirical distribution function (1/n) * #{values <= t}; right-continuous."""
    return float(np.searchsorted(s.values, t, side="right")) / s.n


def normal_quantile(p: float) -> float:
    """Upper p-th percentile of the standard normal: the z with Phi(z) = 1 - p."""
    if not 0.0 < p < 1.0:
        raise ArgumentError(f"quantile level must be strictly inside (0, 1), got {p!r}")
    return float(ndtri(1.0 - p))


def normal_cdf(z: float) -> float:
    """Standard normal CDF."""
    return float(ndtr(z))
