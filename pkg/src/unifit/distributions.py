"""Lifetime distributions for the simulation engine.

Sampling is by CDF inversion wherever the inverse is elementary, so a fixed
random stream pins the exact draws; the gamma family uses numpy's generator
(Marsaglia-Tsang), which is likewise deterministic given the stream. The
module also calibrates uniform censoring: given lifetimes X and C ~ U(0, c),
find c so that P(X > C) hits a requested censoring rate.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaincc

from .errors import ArgumentError, CalibrationError
from .samples import Sample

__all__ = [
    "DistributionSpec",
    "parse_distribution",
    "sample_dist",
    "censoring_rate",
    "calibrate_censoring",
]

_FAMILIES = ("uniform", "exponential", "gamma", "weibull", "pareto")
_ALIASES = {"exp": "exponential", "unif": "uniform"}


@dataclass(frozen=True)
class DistributionSpec:
    """A lifetime distribution family plus its parameters.

    Parameter order: uniform(a, b); exponential(rate); gamma(shape, scale);
    weibull(shape, scale); pareto(scale, shape) with support [scale, inf).
    """

    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        family = _ALIASES.get(self.family, self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        p = self.params
        if family == "uniform":
            if len(p) != 2 or not p[0] < p[1]:
                raise ArgumentError(f"uniform needs a < b, got {p}")
        elif family == "exponential":
            if len(p) != 1 or p[0] <= 0:
                raise ArgumentError(f"exponential needs rate > 0, got {p}")
        elif family in ("gamma", "weibull"):
            if len(p) != 2 or p[0] <= 0 or p[1] <= 0:
                raise ArgumentError(f"{family} needs shape > 0 and scale > 0, got {p}")
        elif family == "pareto":
            if len(p) != 2 or p[0] <= 0 or p[1] <= 0:
                raise ArgumentError(f"pareto needs scale > 0 and shape > 0, got {p}")
        else:
            raise ArgumentError(f"unknown family {self.family!r}; expected one of {_FAMILIES}")

    @property
    def label(self) -> str:
        inner = ",".join(f"{p:g}" for p in self.params)
        return f"{self.family}({inner})"

    @property
    def sampler_name(self) -> str:
        if self.family == "gamma":
            return "numpy Generator.gamma (Marsaglia-Tsang)"
        return "inversion"

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = self.params
        u = None if self.family == "gamma" else rng.random(n)
        if self.family == "uniform":
            return p[0] + (p[1] - p[0]) * u
        if self.family == "exponential":
            return -np.log1p(-u) / p[0]
        if self.family == "weibull":
            return p[1] * (-np.log1p(-u)) ** (1.0 / p[0])
        if self.family == "pareto":
            return p[0] * (1.0 - u) ** (-1.0 / p[1])
        return rng.gamma(shape=p[0], scale=p[1], size=n)

    def survival(self, u: float) -> float:
        """P(X > u)."""
        p = self.params
        if u <= 0:
            return 1.0
        if self.family == "uniform":
            a, b = p
            if u <= a:
                return 1.0
            return (b - u) / (b - a) if u < b else 0.0
        if self.family == "exponential":
            return math.exp(-p[0] * u)
        if self.family == "weibull":
            return math.exp(-((u / p[1]) ** p[0]))
        if self.family == "pareto":
            return 1.0 if u <= p[0] else (p[0] / u) ** p[1]
        return float(gammaincc(p[0], u / p[1]))

    def survival_integral(self, c: float) -> float:
        """Integral of the survival function over (0, c); closed form where one
        exists (uniform, exponential, pareto), adaptive quadrature otherwise."""
        if c <= 0:
            return 0.0
        p = self.params
        if self.family == "uniform":
            a, b = p
            if c <= a:
                return c
            top = min(c, b)
            return a + ((b - a) ** 2 - (b - top) ** 2) / (2.0 * (b - a))
        if self.family == "exponential":
            return -math.expm1(-p[0] * c) / p[0]
        if self.family == "pareto":
            s, shape = p
            if c <= s:
                return c
            if shape == 1.0:
                return s + s * math.log(c / s)
            return s + s**shape * (c ** (1.0 - shape) - s ** (1.0 - shape)) / (1.0 - shape)
        value, _ = quad(self.survival, 0.0, c, limit=200)
        return float(value)


def parse_distribution(text: str) -> DistributionSpec:
    """Parse a "family:p1,p2" description, e.g. "uniform:0,1.2" or "exp:1"."""
    name, sep, rest = text.partition(":")
    if not sep or not rest:
        raise ArgumentError(f"distribution must look like 'family:p1,p2', got {text!r}")
    try:
        params = tuple(float(tok) for tok in rest.split(","))
    except ValueError as exc:
        raise ArgumentError(f"bad distribution parameters in {text!r}") from exc
    return DistributionSpec(name.strip().lower(), params)


def sample_dist(spec: DistributionSpec, n: int, stream: np.random.Generator) -> Sample:
    """n i.i.d. draws from the given stream, wrapped as a Sample."""
    if n < 1:
        raise ArgumentError(f"sample size must be positive, got {n}")
    return Sample(spec.draw(stream, n))


def censoring_rate(spec: DistributionSpec, c: float) -> float:
    """P(X > C) for lifetimes X from ``spec`` and C ~ U(0, c)."""
    if c <= 0:
        raise ArgumentError(f"censoring upper bound must be positive, got {c}")
    return spec.survival_integral(c) / c


@lru_cache(maxsize=None)
def calibrate_censoring(spec: DistributionSpec, target: float) -> float:
    """Find c with P(X > C) equal to ``target`` when C ~ U(0, c).

    The rate is continuous and decreasing in c, from 1 near c = 0 towards 0,
    so a bracket is grown by doubling and Brent's method finishes it off. The
    attained rate matches the target to 1e-8 or a CalibrationError reports
    the range actually achievable.
    """
    if not 0.0 < target < 1.0:
        raise CalibrationError(
            f"target censoring rate must be inside (0, 1), got {target!r}",
            achievable=(0.0, 1.0),
        )
    lo = 1e-9
    hi = 1.0
    while censoring_rate(spec, hi) > target:
        hi *= 2.0
        if hi > 1e12:
            raise CalibrationError(
                f"cannot reach censoring rate {target} for {spec.label}; "
                f"rate at c={hi:g} is still {censoring_rate(spec, hi):.6g}",
                achievable=(censoring_rate(spec, hi), 1.0),
            )
    rate_lo = censoring_rate(spec, lo)
    if rate_lo < target:
        raise CalibrationError(
            f"cannot reach censoring rate {target} for {spec.label}; "
            f"achievable range is ({censoring_rate(spec, hi):.6g}, {rate_lo:.6g})",
            achievable=(censoring_rate(spec, hi), rate_lo),
        )
    c = float(brentq(lambda x: censoring_rate(spec, x) - target, lo, hi, xtol=1e-13, rtol=8.9e-16))
    attained = censoring_rate(spec, c)
    if abs(attained - target) > 1e-8:
        raise CalibrationError(
            f"calibration for {spec.label} stalled at rate {attained!r} (target {target})"
        )
    return c
