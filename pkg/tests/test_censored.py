"""Tests for the censored test: curve, weights, statistic, variance, decision."""

import numpy as np
import pytest

from unifit import (
    CensoredSample,
    DegenerateWeightError,
    KaplanMeierCurve,
    Sample,
    SampleSizeError,
    censored_delta,
    censored_null_variance,
    censored_test,
    censoring_survival,
    conditional_kernel_mean,
    delta_test,
    delta_ustat,
    ipcw_weights,
    km_at,
    residual_weight,
)
from unifit.censored import _influence_terms
from unifit.rng import PURPOSE_SIMULATION, substream


def cens(times, status) -> CensoredSample:
    return CensoredSample.from_arrays(times, status)


class TestCensoringSurvival:
    def test_no_censoring_is_one(self):
        curve = censoring_survival(cens([1.0, 2.0, 3.0], [1, 1, 1]))
        assert curve.jump_times.size == 0
        for t in (0.0, 1.5, 10.0):
            assert km_at(curve, t) == 1.0

    def test_single_censoring(self):
        # one censoring at t=2 with two at risk
        curve = censoring_survival(cens([1, 2, 3], [1, 0, 1]))
        assert km_at(curve, 1.9) == 1.0
        assert km_at(curve, 2.0) == 0.5
        assert km_at(curve, 5.0) == 0.5

    def test_two_censorings_product(self):
        curve = censoring_survival(cens([1, 2], [0, 0]))
        assert km_at(curve, 1.0) == pytest.approx(0.5)
        assert km_at(curve, 1.5) == pytest.approx(0.5)
        assert km_at(curve, 2.0) == pytest.approx(0.0)

    def test_left_limit(self):
        curve = censoring_survival(cens([1, 2, 3], [1, 0, 1]))
        assert km_at(curve, 2.0, left_limit=True) == 1.0
        assert km_at(curve, 2.0, left_limit=False) == 0.5
        assert km_at(curve, 0.0) == 1.0
        assert km_at(curve, 0.0, left_limit=True) == 1.0

    def test_tied_event_stays_at_risk(self):
        # censoring at t=1 sees 3 at risk because the tied event counts
        curve = censoring_survival(cens([1, 1, 2], [1, 0, 1]))
        assert km_at(curve, 1.0) == pytest.approx(2.0 / 3.0)

    def test_monotone_in_unit_range(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            n = int(rng.integers(1, 40))
            t = rng.random(n) * 3
            d = rng.integers(0, 2, n)
            curve = censoring_survival(cens(t, d))
            values = curve.survival_values
            assert np.all(values >= -1e-15) and np.all(values <= 1.0 + 1e-15)
            assert np.all(np.diff(values) <= 1e-15)


class TestIpcwWeights:
    def test_weights_on_worked_example(self):
        cs = cens([1, 2, 3], [1, 0, 1])
        w = ipcw_weights(cs)
        assert w.weight == pytest.approx([1.0, 0.0, 2.0])
        assert w.usable.all()

    def test_event_weights_at_least_one(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            n = int(rng.integers(2, 50))
            t = rng.random(n)
            d = rng.integers(0, 2, n)
            w = ipcw_weights(cens(t, d))
            events = w.status == 1
            assert np.all(w.weight[events & w.usable] >= 1.0 - 1e-12)

    def test_unusable_flag_via_external_curve(self):
        # a curve that has already hit zero below an event time
        curve = KaplanMeierCurve(np.array([0.5]), np.array([0.0]), 4)
        cs = cens([1.0, 2.0], [1, 1])
        w = ipcw_weights(cs, curve)
        assert not w.usable.any()
        assert w.first_unusable() == 0

    def test_mass_preservation(self):
        # mean of delta/K(Y-) is ~1 over replications (within 4 SE)
        means = []
        for rep in range(400):
            gen = substream(17, PURPOSE_SIMULATION, rep)
            x = gen.random(60)
            c = 2.5 * gen.random(60)
            cs = cens(np.minimum(x, c), (x <= c).astype(int))
            means.append(ipcw_weights(cs).weight.mean())
        se = np.std(means) / np.sqrt(len(means))
        assert abs(np.mean(means) - 1.0) < 4 * se


class TestCensoredDelta:
    def test_worked_example(self):
        # single usable pair: h(1,3)=4, weights 1 and 2 -> (2/6)*8 = 8/3
        assert censored_delta(cens([1, 2, 3], [1, 0, 1])) == pytest.approx(8.0 / 3.0)

    def test_tie_convention_example(self):
        # events at 1 and 2, censoring tied at 1; K(1-)=1, K(2-)=2/3
        # h(1,2)=1.5, weights 1 and 1.5 -> (2/6)*1.5*1.5 = 0.75
        assert censored_delta(cens([1, 1, 2], [1, 0, 1])) == pytest.approx(0.75)

    def test_reduces_to_complete_statistic_exactly(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(2, 80))
            x = rng.random(n)
            got = censored_delta(cens(x, np.ones(n, dtype=int)))
            assert got == delta_ustat(Sample(x))

    def test_requires_two_events(self):
        with pytest.raises(SampleSizeError):
            censored_delta(cens([1, 2, 3], [1, 0, 0]))

    def test_degenerate_weight_error_names_observation(self):
        curve = KaplanMeierCurve(np.array([0.5]), np.array([0.0]), 3)
        cs = cens([0.2, 1.0, 2.0], [1, 1, 1])
        with pytest.raises(DegenerateWeightError) as err:
            conditional_kernel_mean(1.0, cs, curve)
        assert err.value.index == 1
        assert err.value.time == 1.0

    def test_left_vs_right_limit_differ_at_censoring_ties(self):
        cs = cens([1, 1, 2], [1, 0, 1])
        left = censored_delta(cs, left_limit=True)
        right = censored_delta(cs, left_limit=False)
        assert left != right


class TestKernelMeanAndWeight:
    def test_kernel_mean_single_observation(self):
        # h(2,1) = 1.5 with unit weight
        assert conditional_kernel_mean(2.0, cens([1.0], [1])) == pytest.approx(1.5)

    def test_kernel_mean_no_censoring_plain_average(self):
        rng = np.random.default_rng(24)
        x = rng.random(30)
        cs = cens(x, np.ones(30, dtype=int))
        t = 0.4
        from unifit import pair_kernel

        assert conditional_kernel_mean(t, cs) == pytest.approx(pair_kernel(t, x).mean())

    def test_residual_weight_worked_example(self):
        # only Y=3 lies beyond t=1.5: h1(3) = (h(3,1)/1 + h(3,3)/0.5)/3 = 16/3
        cs = cens([1, 2, 3], [1, 0, 1])
        assert conditional_kernel_mean(3.0, cs) == pytest.approx(16.0 / 3.0)
        assert residual_weight(1.5, cs) == pytest.approx(16.0 / 3.0)

    def test_residual_weight_beyond_sample_is_zero(self):
        cs = cens([1, 2, 3], [1, 0, 1])
        assert residual_weight(3.0, cs) == 0.0
        assert residual_weight(99.0, cs) == 0.0

    def test_residual_weight_no_censoring_tail_mean(self):
        rng = np.random.default_rng(25)
        x = rng.random(40)
        cs = cens(x, np.ones(40, dtype=int))
        t = 0.6
        h1 = np.array([conditional_kernel_mean(v, cs) for v in x])
        beyond = x > t
        assert residual_weight(t, cs) == pytest.approx(h1[beyond].mean())


def brute_force_influence(times, status):
    """Straight transcription of the formulas with python loops."""

    def h(x, y):
        return 0.5 * (2 * max(x, y) - 2 * x - 2 * y + x * x + y * y)

    n = len(times)

    def km(t, left):
        jumps = sorted({times[i] for i in range(n) if status[i] == 0})
        val = 1.0
        for u in jumps:
            if (u < t) if left else (u <= t):
                d = sum(1 for i in range(n) if times[i] == u and status[i] == 0)
                r = sum(1 for i in range(n) if times[i] >= u)
                val *= 1.0 - d / r
        return val

    g = [status[i] / km(times[i], True) if status[i] else 0.0 for i in range(n)]
    h1 = [sum(h(times[i], times[j]) * g[j] for j in range(n)) / n for i in range(n)]

    def w(t):
        beyond = [i for i in range(n) if times[i] > t]
        if not beyond:
            return 0.0
        return sum(h1[i] * g[i] for i in beyond) / len(beyond)

    out = []
    for i in range(n):
        comp = 0.0
        for j in range(n):
            if status[j] == 0 and times[i] >= times[j]:
                comp += w(times[j]) / sum(1 for k in range(n) if times[k] >= times[j])
        out.append(h1[i] * g[i] + (1 - status[i]) * w(times[i]) - comp)
    return np.array(out)


class TestNullVariance:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(26)
        for trial in range(25):
            n = int(rng.integers(3, 18))
            x = rng.random(n)
            c = 2.0 * rng.random(n)
            t = np.minimum(x, c)
            d = (x <= c).astype(np.int64)
            if trial % 3 == 0:
                t = np.round(t, 1)  # force ties
            if d.sum() < 2:
                continue
            mine = _influence_terms(t, d, "corrected", True)
            assert np.allclose(mine, brute_force_influence(t, d), atol=1e-12)

    def test_no_censoring_reduces_to_jackknife_form(self):
        rng = np.random.default_rng(27)
        x = rng.random(25)
        cs = cens(x, np.ones(25, dtype=int))
        h1 = np.array([conditional_kernel_mean(v, cs) for v in x])
        expected = 4.0 / 24 * np.sum((h1 - h1.mean()) ** 2)
        assert censored_null_variance(cs) == pytest.approx(expected, abs=1e-12)

    def test_two_point_edge_case(self):
        sigma2 = censored_null_variance(cens([0.2, 0.7], [1, 1]))
        assert np.isfinite(sigma2)
        assert sigma2 >= 0.0

    def test_nonnegative_and_order_invariant(self):
        rng = np.random.default_rng(28)
        for _ in range(20):
            n = int(rng.integers(3, 40))
            x = rng.random(n)
            c = 2.5 * rng.random(n)
            t = np.minimum(x, c)
            d = (x <= c).astype(np.int64)
            if d.sum() < 2:
                continue
            cs = cens(t, d)
            base = censored_null_variance(cs)
            assert base >= 0.0
            perm = rng.permutation(n)
            assert censored_null_variance(cens(t[perm], d[perm])) == pytest.approx(base, abs=1e-10)

    def test_martingale_residuals_sum_to_zero(self):
        # observed censorings minus their compensator cancel across the sample
        rng = np.random.default_rng(29)
        for _ in range(20):
            n = int(rng.integers(3, 40))
            x = rng.random(n)
            c = 1.5 * rng.random(n)
            t = np.minimum(x, c)
            d = (x <= c).astype(np.int64)
            if d.sum() < 2:
                continue
            curve = censoring_survival(cens(t, d))
            surv = curve.at_many(t, left_limit=True)
            g = np.where(d == 1, 1.0 / np.where(surv > 0, surv, 1.0), 0.0)
            v = _influence_terms(t, d, "corrected", True)
            residuals = v - conditional_kernel_mean_all(t, d) * g
            assert abs(residuals.sum()) < 1e-9

    def test_literal_mode_differs_under_censoring(self):
        rng = np.random.default_rng(30)
        x = rng.random(30)
        c = 1.2 * rng.random(30)
        t = np.minimum(x, c)
        d = (x <= c).astype(np.int64)
        cs = cens(t, d)
        assert censored_null_variance(cs, residual="corrected") != censored_null_variance(
            cs, residual="literal"
        )

    def test_literal_mode_same_reduction_without_censoring(self):
        rng = np.random.default_rng(31)
        x = rng.random(20)
        cs = cens(x, np.ones(20, dtype=int))
        assert censored_null_variance(cs, residual="literal") == pytest.approx(
            censored_null_variance(cs, residual="corrected")
        )


def conditional_kernel_mean_all(t, d):
    from unifit.censored import _km_from_arrays
    from unifit import pair_kernel

    curve = _km_from_arrays(t, d)
    surv = curve.at_many(t, left_limit=True)
    g = np.where(d == 1, 1.0 / np.where(surv > 0, surv, 1.0), 0.0)
    return pair_kernel(t[:, None], t[None, :]) @ g / t.size


class TestCensoredTest:
    def test_worked_example_statistic(self):
        r = censored_test(cens([1, 2, 3], [1, 0, 1]), 0.05)
        assert r.statistic == pytest.approx(8.0 / 3.0)
        assert r.method == "censored-delta"
        assert r.reject == (abs(r.standardized) > r.critical_value)

    def test_no_censoring_matches_complete_delta_statistic(self):
        rng = np.random.default_rng(32)
        x = rng.random(60)
        r_cens = censored_test(cens(x, np.ones(60, dtype=int)), 0.05)
        r_comp = delta_test(Sample(x), 0.05)
        assert r_cens.statistic == pytest.approx(r_comp.statistic, abs=1e-14)

    def test_ipcw_unbiased_under_null(self):
        # known 20% censoring on uniform lifetimes: mean statistic within 4 SE of 0
        deltas = np.empty(10_000)
        for rep in range(10_000):
            gen = substream(19, PURPOSE_SIMULATION, rep)
            x = gen.random(100)
            c = 2.5 * gen.random(100)
            deltas[rep] = censored_delta(cens(np.minimum(x, c), (x <= c).astype(int)))
        se = deltas.std() / np.sqrt(deltas.size)
        assert abs(deltas.mean()) < 4 * se

    def test_alpha_propagates(self):
        cs = cens([1, 2, 3, 4], [1, 1, 0, 1])
        r = censored_test(cs, 0.01)
        assert r.critical_value == pytest.approx(2.575829303548899, abs=1e-8)
