"""Classical uniformity statistics and their Monte Carlo calibration.

Four competitors to the delta test: Kolmogorov-Smirnov, Frozini, Sherman,
and the Quesenberry-Miller Q statistic. None of them has a usable
small-sample closed form at the sizes studied here, so critical values are
simulated under the null and cached on disk keyed by
(method, n, alpha, reps, seed).
"""

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .delta import TestResult
from .errors import ArgumentError, DomainError, SampleSizeError
from .rng import PURPOSE_CALIBRATION, substream
from .samples import OrderedSample, Sample, sort_sample

__all__ = [
    "CLASSICAL_METHODS",
    "CriticalValueTable",
    "ks_stat",
    "frozini_stat",
    "sherman_stat",
    "q_stat",
    "mc_critical_value",
    "classical_test",
    "default_cache_dir",
]

CACHE_ENV_VAR = "UNIFIT_CACHE_DIR"
CACHE_FILE = "critical_values.tsv"


def _require_nonempty(s: OrderedSample) -> None:
    if s.n < 1:  # unreachable through the public constructors, kept as a guard
        raise SampleSizeError("statistic needs a nonempty sample")


def _require_unit_interval(s: OrderedSample, method: str) -> None:
    if s.values[0] < 0.0 or s.values[-1] > 1.0:
        raise DomainError(
            f"{method} uses the boundary spacings against 0 and 1; "
            "observations must lie in [0, 1] (standardize first)"
        )


def ks_stat(s: OrderedSample) -> float:
    """Kolmogorov-Smirnov distance to the U(0,1) CDF (truncated to [0,1])."""
    _require_nonempty(s)
    return float(_ks_rows(s.values[None, :])[0])


def frozini_stat(s: OrderedSample) -> float:
    """Frozini statistic: scaled absolute deviations from the plotting positions."""
    _require_nonempty(s)
    return float(_frozini_rows(s.values[None, :])[0])


def sherman_stat(s: OrderedSample) -> float:
    """Sherman statistic: half the total deviation of spacings from 1/(n+1).

    Spacings are taken against the boundary conventions x_(0)=0 and
    x_(n+1)=1, so the data must live in the unit interval.
    """
    _require_nonempty(s)
    _require_unit_interval(s, "sherman")
    return float(_sherman_rows(s.values[None, :])[0])


def q_stat(s: OrderedSample) -> float:
    """Q statistic: sum of squared spacings plus adjacent-spacing products."""
    _require_nonempty(s)
    _require_unit_interval(s, "q")
    return float(_q_rows(s.values[None, :])[0])


# Row-wise implementations shared by the scalar statistics and the Monte
# Carlo calibration; each takes a (reps, n) matrix sorted along axis 1.


def _ks_rows(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    f0 = np.clip(x, 0.0, 1.0)
    j = np.arange(1.0, n + 1.0)
    d_plus = np.max(j / n - f0, axis=1)
    d_minus = np.max(f0 - (j - 1.0) / n, axis=1)
    return np.maximum(d_plus, d_minus)


def _frozini_rows(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    j = np.arange(1.0, n + 1.0)
    return np.sum(np.abs(x - (j - 0.5) / n), axis=1) / math.sqrt(n)


def _spacings(x: np.ndarray) -> np.ndarray:
    reps, n = x.shape
    padded = np.empty((reps, n + 2))
    padded[:, 0] = 0.0
    padded[:, 1:-1] = x
    padded[:, -1] = 1.0
    return np.diff(padded, axis=1)


def _sherman_rows(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    gaps = _spacings(x)
    return 0.5 * np.sum(np.abs(gaps - 1.0 / (n + 1.0)), axis=1)


def _q_rows(x: np.ndarray) -> np.ndarray:
    gaps = _spacings(x)
    return np.sum(gaps * gaps, axis=1) + np.sum(gaps[:, 1:] * gaps[:, :-1], axis=1)


_ROW_STATS = {
    "ks": _ks_rows,
    "frozini": _frozini_rows,
    "sherman": _sherman_rows,
    "q": _q_rows,
}

CLASSICAL_METHODS = tuple(_ROW_STATS)


def _canonical_method(method: str) -> str:
    name = method.strip().lower()
    if name not in _ROW_STATS:
        raise ArgumentError(
            f"unknown method {method!r}; expected one of {sorted(_ROW_STATS)}"
        )
    return name


def null_statistics(method: str, n: int, reps: int, seed: int) -> np.ndarray:
    """Simulate the null distribution of a statistic over fixed substreams.

    Replication r always draws from substream (seed, calibration, r), so the
    result is independent of the block size used here or of any concurrent
    scheduling a caller might layer on top.
    """
    row_fn = _ROW_STATS[_canonical_method(method)]
    if n < 1 or reps < 1:
        raise ArgumentError("n and reps must be positive")
    out = np.empty(reps)
    block = max(1, min(reps, 4_000_000 // n))
    buf = np.empty((block, n))
    done = 0
    while done < reps:
        take = min(block, reps - done)
        for r in range(take):
            buf[r] = substream(seed, PURPOSE_CALIBRATION, done + r).random(n)
        chunk = np.sort(buf[:take], axis=1)
        out[done : done + take] = row_fn(chunk)
        done += take
    return out


def empirical_upper_quantile(values: np.ndarray, alpha: float) -> float:
    """Empirical (1 - alpha)-quantile: smallest v with #{x <= v} >= (1-alpha)*len."""
    ordered = np.sort(values)
    k = math.ceil((1.0 - alpha) * ordered.size - 1e-9)
    k = min(max(k, 1), ordered.size)
    return float(ordered[k - 1])


@dataclass(frozen=True)
class CriticalValueTable:
    """One calibrated critical value: the empirical (1-alpha)-quantile of the
    null statistic distribution over ``reps`` replications of size ``n``."""

    method: str
    n: int
    alpha: float
    value: float
    reps: int
    seed: int


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "unifit"


def _cache_path(cache_dir) -> Path:
    base = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    return base / CACHE_FILE


def load_cache(cache_dir=None) -> dict[tuple, float]:
    """Read the on-disk critical-value table; keys are (method, n, alpha, reps, seed)."""
    path = _cache_path(cache_dir)
    table: dict[tuple, float] = {}
    if not path.exists():
        return table
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if header.strip() and header.split() != ["method", "n", "alpha", "reps", "seed", "value"]:
            raise ArgumentError(f"unrecognized critical-value cache header in {path}")
        for line in fh:
            if not line.strip():
                continue
            method, n, alpha, reps, seed, value = line.split("\t")
            table[(method, int(n), float(alpha), int(reps), int(seed))] = float(value)
    return table


def save_cache(table: dict[tuple, float], cache_dir=None) -> Path:
    """Rewrite the cache file; floats are stored via repr so they round-trip bit-exactly."""
    path = _cache_path(cache_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["method\tn\talpha\treps\tseed\tvalue\n"]
    for (method, n, alpha, reps, seed), value in sorted(table.items()):
        lines.append(f"{method}\t{n}\t{alpha!r}\t{reps}\t{seed}\t{value!r}\n")
    tmp = path.with_suffix(".tmp")
    tmp.write_text("".join(lines), encoding="utf-8")
    tmp.replace(path)
    return path


def mc_critical_value(
    method: str,
    n: int,
    alpha: float,
    reps: int = 10_000,
    seed: int = 0,
    cache_dir=None,
) -> CriticalValueTable:
    """Monte-Carlo critical value for a classical statistic, cached on disk."""
    method = _canonical_method(method)
    if not 0.0 < alpha < 1.0:
        raise ArgumentError(f"alpha must be strictly inside (0, 1), got {alpha!r}")
    key = (method, n, float(alpha), reps, seed)
    cache = load_cache(cache_dir)
    if key in cache:
        return CriticalValueTable(method, n, float(alpha), cache[key], reps, seed)
    stats = null_statistics(method, n, reps, seed)
    value = empirical_upper_quantile(stats, alpha)
    cache[key] = value
    save_cache(cache, cache_dir)
    return CriticalValueTable(method, n, float(alpha), value, reps, seed)


def classical_test(
    s: Sample,
    method: str,
    alpha: float = 0.05,
    reps: int = 10_000,
    seed: int = 0,
    cache_dir=None,
    q_tail: str = "equal-tail",
) -> TestResult:
    """Run one classical test with Monte-Carlo calibration.

    KS, Frozini and Sherman reject in the upper tail (each grows under
    alternatives). Q can drift in either direction, so by default it uses an
    equal-tail two-sided region; pass ``q_tail="upper"`` for the one-sided
    variant. The result's ``tail`` field records which rule was applied.
    """
    method = _canonical_method(method)
    ordered = sort_sample(s)
    stat = {
        "ks": ks_stat,
        "frozini": frozini_stat,
        "sherman": sherman_stat,
        "q": q_stat,
    }[method](ordered)

    null = np.sort(null_statistics(method, s.n, reps, seed))
    p_upper = (1.0 + np.sum(null >= stat)) / (reps + 1.0)

    if method == "q" and q_tail == "equal-tail":
        upper = empirical_upper_quantile(null, alpha / 2.0)
        lower = empirical_upper_quantile(null, 1.0 - alpha / 2.0)
        p_lower = (1.0 + np.sum(null <= stat)) / (reps + 1.0)
        p_value = min(1.0, 2.0 * min(p_upper, p_lower))
        reject = stat > upper or stat < lower
        tail = "equal-tail"
        critical, critical_lower = upper, lower
    elif method != "q" or q_tail == "upper":
        critical = empirical_upper_quantile(null, alpha)
        p_value = p_upper
        reject = stat > critical
        tail = "upper"
        critical_lower = None
    else:
        raise ArgumentError(f"q_tail must be 'equal-tail' or 'upper', got {q_tail!r}")

    # Persist whatever quantiles this run produced.
    cache = load_cache(cache_dir)
    if tail == "equal-tail":
        cache[(method, s.n, float(alpha / 2.0), reps, seed)] = critical
        cache[(method, s.n, float(1.0 - alpha / 2.0), reps, seed)] = critical_lower
    else:
        cache[(method, s.n, float(alpha), reps, seed)] = critical
    save_cache(cache, cache_dir)

    return TestResult(
        method=method,
        statistic=stat,
        standardized=stat,
        critical_value=critical,
        p_value=float(p_value),
        alpha=alpha,
        reject=bool(reject),
        tail=tail,
        critical_lower=critical_lower,
    )
