"""The delta test under right censoring.

Uncensored observations are reweighted by the inverse of the censoring
survival function, estimated by the Kaplan-Meier product limit applied to
the censoring indicators. The test statistic is the reweighted pair average
of the same kernel as the complete-data test; its null variance is
estimated from per-observation influence terms whose censored part is a
martingale residual against the censoring hazard.
"""

from dataclasses import dataclass

import numpy as np

from .delta import TestResult, pair_kernel
from .errors import ArgumentError, DegenerateWeightError, SampleSizeError
from .samples import CensoredSample, normal_cdf, normal_quantile

__all__ = [
    "KaplanMeierCurve",
    "IpcwWeights",
    "censoring_survival",
    "km_at",
    "ipcw_weights",
    "censored_delta",
    "conditional_kernel_mean",
    "residual_weight",
    "censored_null_variance",
    "censored_test",
]


@dataclass(frozen=True)
class KaplanMeierCurve:
    """Right-continuous product-limit estimate of the censoring survival function.

    ``jump_times`` holds the distinct times carrying at least one censoring;
    ``survival_values[k]`` is the curve's value at and after ``jump_times[k]``.
    Before the first jump the curve is 1.
    """

    jump_times: np.ndarray
    survival_values: np.ndarray
    n_at_construction: int

    def __post_init__(self):
        jumps = np.asarray(self.jump_times, dtype=float)
        surv = np.asarray(self.survival_values, dtype=float)
        jumps.setflags(write=False)
        surv.setflags(write=False)
        object.__setattr__(self, "jump_times", jumps)
        object.__setattr__(self, "survival_values", surv)

    def at(self, t: float, left_limit: bool = False) -> float:
        """Value at ``t``; with ``left_limit`` the product runs over jumps strictly before ``t``."""
        return float(self.at_many(np.asarray([t], dtype=float), left_limit)[0])

    def at_many(self, t: np.ndarray, left_limit: bool = False) -> np.ndarray:
        side = "left" if left_limit else "right"
        idx = np.searchsorted(self.jump_times, t, side=side)
        padded = np.concatenate(([1.0], self.survival_values))
        return padded[idx]


def censoring_survival(cs: CensoredSample) -> KaplanMeierCurve:
    """Kaplan-Meier estimate of the censoring survival, treating status 0 as the event.

    At each distinct time with d censorings and r = #{Y_j >= t} at risk, the
    survival multiplies by (1 - d/r). Counting everyone with Y_j >= t keeps
    tied failures in the risk set of a same-time censoring, which is the
    convention that makes the uncensored special case exact.
    """
    return _km_from_arrays(cs.times, cs.status)


def _km_from_arrays(t: np.ndarray, d: np.ndarray) -> KaplanMeierCurve:
    n = t.size
    censor_times = t[d == 0]
    if censor_times.size == 0:
        empty = np.empty(0)
        return KaplanMeierCurve(empty, empty, n)
    ts = np.sort(t)
    uniq, counts = np.unique(censor_times, return_counts=True)
    at_risk = n - np.searchsorted(ts, uniq, side="left")
    survival = np.cumprod(1.0 - counts / at_risk)
    return KaplanMeierCurve(uniq, survival, n)


def km_at(curve: KaplanMeierCurve, t: float, left_limit: bool = False) -> float:
    """Function form of :meth:`KaplanMeierCurve.at`."""
    return curve.at(t, left_limit)


@dataclass(frozen=True)
class IpcwWeights:
    """Per-observation inverse-censoring weights delta_i / K(Y_i-).

    ``usable`` is False exactly where an uncensored observation fell on a
    zero of the censoring survival; consumers must treat those as errors
    rather than dropping them.
    """

    status: np.ndarray
    survival: np.ndarray
    weight: np.ndarray
    usable: np.ndarray

    def first_unusable(self) -> int | None:
        bad = np.flatnonzero(~self.usable)
        return int(bad[0]) if bad.size else None


def ipcw_weights(
    cs: CensoredSample,
    curve: KaplanMeierCurve | None = None,
    left_limit: bool = True,
) -> IpcwWeights:
    if curve is None:
        curve = censoring_survival(cs)
    surv = curve.at_many(cs.times, left_limit=left_limit)
    events = cs.status == 1
    usable = ~(events & (surv <= 0.0))
    weight = np.zeros(cs.n)
    ok = events & usable
    weight[ok] = 1.0 / surv[ok]
    return IpcwWeights(status=cs.status, survival=surv, weight=weight, usable=usable)


def _weights_or_raise(cs, curve, left_limit) -> np.ndarray:
    w = ipcw_weights(cs, curve, left_limit)
    bad = w.first_unusable()
    if bad is not None:
        raise DegenerateWeightError(bad, float(cs.times[bad]))
    return w.weight


def censored_delta(cs: CensoredSample, left_limit: bool = True) -> float:
    """Reweighted pair average of the kernel over uncensored pairs.

    Reduces exactly to the complete-data statistic when nothing is censored.
    ``left_limit`` selects K(Y-) (default) or K(Y) in the weights; the two
    differ only at censoring-time ties.
    """
    cs.require_events(2)
    g = _weights_or_raise(cs, None, left_limit)
    return _pair_average(cs.times, g)


def _pair_average(t: np.ndarray, g: np.ndarray) -> float:
    n = t.size
    if n < 2:
        raise SampleSizeError(f"pairwise statistic needs n >= 2, got {n}")
    kernel = pair_kernel(t[:, None], t[None, :]) * np.outer(g, g)
    return float((kernel.sum() - np.trace(kernel)) / (n * (n - 1)))


def conditional_kernel_mean(
    t: float,
    cs: CensoredSample,
    curve: KaplanMeierCurve | None = None,
    left_limit: bool = True,
) -> float:
    """Reweighted estimate of the kernel's conditional mean at ``t``:
    (1/n) sum_i h(t, Y_i) delta_i / K(Y_i-)."""
    g = _weights_or_raise(cs, curve, left_limit)
    return float(np.dot(pair_kernel(t, cs.times), g) / cs.n)


def residual_weight(
    t: float,
    cs: CensoredSample,
    curve: KaplanMeierCurve | None = None,
    left_limit: bool = True,
) -> float:
    """Weight function of the censoring-martingale residual at ``t``.

    Averages the reweighted conditional kernel means over observations
    strictly beyond ``t``; by convention 0 once nothing is at risk.
    """
    if curve is None:
        curve = censoring_survival(cs)
    g = _weights_or_raise(cs, curve, left_limit)
    beyond = cs.times > t
    count = int(beyond.sum())
    if count == 0:
        return 0.0
    kernel = pair_kernel(cs.times[:, None], cs.times[None, :])
    h1 = kernel @ g / cs.n
    return float(np.sum(h1[beyond] * g[beyond]) / count)


def _influence_terms(
    t: np.ndarray, d: np.ndarray, residual: str, left_limit: bool
) -> np.ndarray:
    """Per-observation influence values V_i whose spread estimates the null variance."""
    n = t.size
    curve = _km_from_arrays(t, d)
    k_left = curve.at_many(t, left_limit=True)
    k_right = curve.at_many(t, left_limit=False)

    def weights(surv: np.ndarray) -> np.ndarray:
        events = d == 1
        bad = events & (surv <= 0.0)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise DegenerateWeightError(i, float(t[i]))
        g = np.zeros(n)
        g[events] = 1.0 / surv[events]
        return g

    ts = np.sort(t)
    order = np.argsort(t, kind="stable")
    rank_right = np.searchsorted(ts, t, side="right")  # #{Y_j <= Y_i}
    rank_left = np.searchsorted(ts, t, side="left")  # #{Y_j < Y_i}
    n_greater = n - rank_right
    n_geq = n - rank_left

    kernel = pair_kernel(t[:, None], t[None, :])

    def tail_mean(a: np.ndarray) -> np.ndarray:
        # w(Y_i) = mean of a over observations with time strictly above Y_i
        suffix = np.concatenate((np.cumsum(a[order][::-1])[::-1], [0.0]))
        return np.where(n_greater > 0, suffix[rank_right] / np.maximum(n_greater, 1), 0.0)

    def running_sum_upto(b: np.ndarray, strict: bool) -> np.ndarray:
        prefix = np.concatenate(([0.0], np.cumsum(b[order])))
        return prefix[rank_left if strict else rank_right]

    if residual == "corrected":
        g = weights(k_left if left_limit else k_right)
        h1 = kernel @ g / n
        a = h1 * g
        w = tail_mean(a)
        # Compensator of the censoring counting process: each censoring at Y_j
        # spreads w(Y_j) / #{Y_k >= Y_j} over everyone still at risk there.
        b = w * (1.0 - d) / n_geq
        return a + (1.0 - d) * w - running_sum_upto(b, strict=False)

    if residual == "literal":
        # The originally printed estimator: the kernel mean keeps left-limit
        # weights but the outer terms use K(Y) and evaluate the weight
        # function at the observation itself, with strict-inequality risk sets.
        g_right = weights(k_right)
        h1 = kernel @ weights(k_left) / n
        a = h1 * g_right
        w = tail_mean(a)
        inv = np.where(n_greater > 0, 1.0 / np.maximum(n_greater, 1), 0.0)
        s = running_sum_upto(inv, strict=True)
        return a + (1.0 - d) * w - (1.0 - d) * w * s

    raise ArgumentError(f"residual must be 'corrected' or 'literal', got {residual!r}")


def censored_null_variance(
    cs: CensoredSample,
    residual: str = "corrected",
    left_limit: bool = True,
) -> float:
    """Estimate of the null asymptotic variance of sqrt(n) times the statistic:
    4/(n-1) times the sum of squared centered influence terms."""
    cs.require_events(2)
    if cs.n < 2:
        raise SampleSizeError(f"variance estimate needs n >= 2, got {cs.n}")
    v = _influence_terms(cs.times, cs.status, residual, left_limit)
    return float(4.0 / (cs.n - 1) * np.sum((v - v.mean()) ** 2))


def _z_statistic(
    t: np.ndarray, d: np.ndarray, residual: str = "corrected", left_limit: bool = True
) -> tuple[float, float, float]:
    """(statistic, variance estimate, standardized value) on raw arrays.

    Shared fast path for :func:`censored_test` and the simulation engine;
    inputs are assumed validated.
    """
    n = t.size
    curve = _km_from_arrays(t, d)
    surv = curve.at_many(t, left_limit=left_limit)
    events = d == 1
    bad = events & (surv <= 0.0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise DegenerateWeightError(i, float(t[i]))
    g = np.zeros(n)
    g[events] = 1.0 / surv[events]
    delta = _pair_average(t, g)
    v = _influence_terms(t, d, residual, left_limit)
    sigma2 = float(4.0 / (n - 1) * np.sum((v - v.mean()) ** 2))
    if sigma2 > 0.0:
        z = float(np.sqrt(n) * delta / np.sqrt(sigma2))
    else:
        z = 0.0 if delta == 0.0 else float(np.copysign(np.inf, delta))
    return delta, sigma2, z


def censored_test(
    cs: CensoredSample,
    alpha: float = 0.05,
    residual: str = "corrected",
    left_limit: bool = True,
) -> TestResult:
    """Two-sided self-normalized test of standard uniformity under right censoring."""
    if not 0.0 < alpha < 1.0:
        raise ArgumentError(f"alpha must be strictly inside (0, 1), got {alpha!r}")
    cs.require_events(2)
    if cs.n < 2:
        raise SampleSizeError(f"censored test needs n >= 2, got {cs.n}")
    delta, _, z = _z_statistic(cs.times, cs.status, residual, left_limit)
    critical = normal_quantile(alpha / 2.0)
    p_value = 2.0 * (1.0 - normal_cdf(abs(z))) if np.isfinite(z) else 0.0
    return TestResult(
        method="censored-delta",
        statistic=delta,
        standardized=z,
        critical_value=critical,
        p_value=float(min(max(p_value, 0.0), 1.0)),
        alpha=alpha,
        reject=abs(z) > critical,
    )
