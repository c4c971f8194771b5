"""The delta test of uniformity for complete samples.

The statistic is the pair average of the symmetric kernel

    h(x, y) = (2*max(x, y) - 2x - 2y + x^2 + y^2) / 2,

whose expectation is zero exactly when the observations are standard
uniform. Under the null, sqrt(n) times the pair average is asymptotically
normal with variance 1/45, which gives the two-sided rejection rule
sqrt(45 n) |statistic| > z_{alpha/2}.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, SampleSizeError
from .samples import OrderedSample, Sample, normal_cdf, normal_quantile, sort_sample

__all__ = [
    "NULL_VARIANCE",
    "TestResult",
    "pair_kernel",
    "delta_ustat",
    "delta_orderstat",
    "delta_test",
]

# Asymptotic variance of sqrt(n) * statistic under the null.
NULL_VARIANCE = 1.0 / 45.0


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test.

    ``tail`` states the shape of the rejection region: "two-sided" compares
    |standardized| with the critical value, "upper" compares the raw
    statistic, and "equal-tail" additionally rejects below
    ``critical_lower`` (used by the Q spacing statistic, whose null
    distribution can be left in either direction).
    """

    method: str
    statistic: float
    standardized: float
    critical_value: float
    p_value: float
    alpha: float
    reject: bool
    tail: str = "two-sided"
    critical_lower: float | None = None


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ArgumentError(f"alpha must be strictly inside (0, 1), got {alpha!r}")


def pair_kernel(x, y):
    """Symmetric kernel h(x, y); accepts scalars or broadcastable arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 0.5 * (2.0 * np.maximum(x, y) - 2.0 * x - 2.0 * y + x * x + y * y)


def delta_ustat(s: Sample) -> float:
    """Pair average of the kernel over all n(n-1)/2 unordered pairs.

    Every pair is evaluated exactly; this is the O(n^2) reference form kept
    as a public cross-check for :func:`delta_orderstat`.
    """
    x = s.values
    n = x.size
    if n < 2:
        raise SampleSizeError(f"pairwise statistic needs n >= 2, got {n}")
    kernel = pair_kernel(x[:, None], x[None, :])
    off_diagonal = kernel.sum() - np.trace(kernel)
    return float(off_diagonal / (n * (n - 1)))


def delta_orderstat(s: OrderedSample) -> float:
    """Closed form of :func:`delta_ustat` on sorted values.

    With 1-based ranks i, the pair sum collapses to
    sum_i (2(i - n) + (n - 1) x_(i)) x_(i) / (n(n-1)), which is O(n) after
    the sort.
    """
    x = s.values
    n = s.n
    if n < 2:
        raise SampleSizeError(f"pairwise statistic needs n >= 2, got {n}")
    i = np.arange(1, n + 1, dtype=float)
    total = np.sum((2.0 * (i - n) + (n - 1) * x) * x)
    return float(total / (n * (n - 1)))


def delta_test(s: Sample, alpha: float = 0.05) -> TestResult:
    """Two-sided test of standard uniformity with asymptotic normal calibration."""
    _check_alpha(alpha)
    stat = delta_orderstat(sort_sample(s))
    n = s.n
    standardized = float(np.sqrt(45.0 * n) * stat)
    critical = normal_quantile(alpha / 2.0)
    p_value = 2.0 * (1.0 - normal_cdf(abs(standardized)))
    return TestResult(
        method="delta",
        statistic=stat,
        standardized=standardized,
        critical_value=critical,
        p_value=float(min(max(p_value, 0.0), 1.0)),
        alpha=alpha,
        reject=abs(standardized) > critical,
    )
