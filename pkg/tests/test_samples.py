"""Tests for sample containers, the EDF, and normal quantiles."""

import math

import numpy as np
import pytest

from unifit import (
    ArgumentError,
    CensoredObservation,
    CensoredSample,
    OrderedSample,
    Sample,
    SampleSizeError,
    edf,
    normal_quantile,
    sort_sample,
)


def bisect_upper_quantile(p: float) -> float:
    """Independent oracle: invert Phi via math.erf by bisection (~1e-15 accurate)."""
    lo, hi = -10.0, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 0.5 * (1.0 + math.erf(mid / math.sqrt(2.0))) < 1.0 - p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestSample:
    def test_holds_values(self):
        s = Sample([0.3, 0.1, 0.2])
        assert s.n == 3
        assert list(s.values) == [0.3, 0.1, 0.2]

    def test_rejects_empty(self):
        with pytest.raises(ArgumentError):
            Sample([])

    @pytest.mark.parametrize("bad", [[0.1, float("nan")], [float("inf")], [0.2, -float("inf")]])
    def test_rejects_nonfinite(self, bad):
        with pytest.raises(ArgumentError):
            Sample(bad)

    def test_immutable(self):
        s = Sample([0.1, 0.2])
        with pytest.raises(ValueError):
            s.values[0] = 5.0


class TestSortSample:
    def test_sorts(self):
        assert list(sort_sample(Sample([0.3, 0.1, 0.2])).values) == [0.1, 0.2, 0.3]

    def test_singleton(self):
        assert list(sort_sample(Sample([0.5])).values) == [0.5]

    def test_duplicates_preserved(self):
        assert list(sort_sample(Sample([0.2, 0.2])).values) == [0.2, 0.2]

    def test_multiset_preserved(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            values = rng.random(rng.integers(1, 40))
            ordered = sort_sample(Sample(values))
            assert sorted(values.tolist()) == ordered.values.tolist()

    def test_ordered_sample_rejects_descending(self):
        with pytest.raises(ArgumentError):
            OrderedSample([0.2, 0.1])


class TestEdf:
    def test_counting(self):
        s = OrderedSample([0.1, 0.2, 0.3])
        assert edf(s, 0.25) == pytest.approx(2 / 3)

    def test_below_support(self):
        s = OrderedSample([0.1, 0.2, 0.3])
        assert edf(s, -1.0) == 0.0

    def test_right_continuous_at_jump(self):
        s = OrderedSample([0.1, 0.2, 0.3])
        assert edf(s, 0.2) == pytest.approx(2 / 3)

    def test_monotone_and_limits(self):
        rng = np.random.default_rng(3)
        s = sort_sample(Sample(rng.random(25)))
        grid = np.linspace(-0.5, 1.5, 101)
        vals = [edf(s, t) for t in grid]
        assert vals == sorted(vals)
        assert edf(s, -1e9) == 0.0
        assert edf(s, 1e9) == 1.0


class TestNormalQuantile:
    def test_median(self):
        assert normal_quantile(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_upper_025(self):
        # bisect_upper_quantile(0.025) = 1.959963984540054
        assert normal_quantile(0.025) == pytest.approx(1.959963984540054, abs=1e-8)

    def test_upper_005(self):
        # bisect_upper_quantile(0.005) = 2.575829303548899
        assert normal_quantile(0.005) == pytest.approx(2.575829303548899, abs=1e-8)

    def test_matches_bisection_oracle(self):
        for p in (0.4, 0.25, 0.1, 0.05, 0.025, 0.005):
            assert normal_quantile(p) == pytest.approx(bisect_upper_quantile(p), abs=1e-9)

    def test_symmetry(self):
        for p in (0.4, 0.25, 0.1, 0.05, 0.025, 0.005):
            assert normal_quantile(p) == pytest.approx(-normal_quantile(1.0 - p), abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
    def test_rejects_out_of_range(self, p):
        with pytest.raises(ArgumentError):
            normal_quantile(p)


class TestCensoredContainers:
    def test_observation_validation(self):
        with pytest.raises(ArgumentError):
            CensoredObservation(-1.0, 1)
        with pytest.raises(ArgumentError):
            CensoredObservation(1.0, 2)
        with pytest.raises(ArgumentError):
            CensoredObservation(float("nan"), 0)

    def test_from_arrays_round_trip(self):
        cs = CensoredSample.from_arrays([1.0, 2.0], [1, 0])
        assert cs.n == 2
        assert cs.n_events == 1
        obs = cs.observations
        assert (obs[0].time, obs[0].status) == (1.0, 1)
        assert (obs[1].time, obs[1].status) == (2.0, 0)

    def test_rejects_empty(self):
        with pytest.raises(ArgumentError):
            CensoredSample([])

    def test_all_censored_constructible(self):
        # needed by the censoring-survival estimator even with zero events
        cs = CensoredSample.from_arrays([1.0, 2.0], [0, 0])
        with pytest.raises(SampleSizeError):
            cs.require_events(2)
