import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from perfmine.stats import (
    BerSample,
    InsufficientDataError,
    PointEstimate,
    StoppingConfig,
    clamp_sample,
    confidence_below,
    point_estimate,
    regularized_incomplete_beta,
    rule_relative_accuracy,
    rule_threshold,
    student_t_cdf,
)

# reference values computed once with scipy.stats.t and frozen
F3_2_TWO_SIDED = 0.860674031441157
F8_3_TWO_SIDED = 0.9829283187662174
WORKED_CONFIDENCE = 0.8870603579411143


def est(mean, sd, n):
    return PointEstimate(mean, sd * sd, n)


class TestStudentT:
    def test_zero_is_half(self):
        for nu in (1, 2, 5, 30, 1000, 10**6):
            assert student_t_cdf(0.0, nu) == 0.5

    def test_cauchy(self):
        assert student_t_cdf(1.0, 1) == pytest.approx(0.75, abs=1e-12)
        for x in (-7.0, -0.3, 2.5, 40.0):
            assert student_t_cdf(x, 1) == pytest.approx(0.5 + math.atan(x) / math.pi, abs=1e-12)

    def test_worked_example(self):
        assert student_t_cdf(1.3808, 5) == pytest.approx(0.887, abs=5e-4)

    def test_invalid_dof(self):
        with pytest.raises(ValueError):
            student_t_cdf(1.0, 0)
        with pytest.raises(ValueError):
            student_t_cdf(float("nan"), 3)

    @pytest.mark.parametrize("nu", [1, 2, 3, 5, 9, 30, 100, 1000, 10**5, 10**7])
    def test_matches_reference(self, nu):
        xs = np.concatenate([np.linspace(-20, 20, 161), [1e-8, -1e-8, 1e3, -1e3]])
        ref = sps.t.cdf(xs, nu)
        got = np.array([student_t_cdf(x, nu) for x in xs])
        assert np.max(np.abs(got - ref)) < 1e-10

    @given(st.floats(-50, 50), st.integers(1, 10**6))
    def test_symmetry(self, x, nu):
        assert abs(student_t_cdf(x, nu) + student_t_cdf(-x, nu) - 1.0) < 1e-10

    @given(st.floats(-30, 30), st.floats(0, 5), st.integers(1, 500))
    def test_monotone(self, x, dx, nu):
        assert student_t_cdf(x + dx, nu) >= student_t_cdf(x, nu) - 1e-15

    def test_normal_limit(self):
        xs = np.linspace(-4, 4, 81)
        diff = [abs(student_t_cdf(x, 1000) - sps.norm.cdf(x)) for x in xs]
        assert max(diff) < 1e-3

    def test_incomplete_beta_reference(self):
        from scipy.special import betainc

        for a, b, x in [(0.5, 0.5, 0.3), (2.5, 0.5, 0.99), (50.0, 0.5, 0.97), (1e4, 0.5, 0.9999), (3.0, 7.0, 0.2)]:
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(betainc(a, b, x), abs=1e-12)


class TestClamp:
    def test_zero_errors(self):
        assert clamp_sample(0, 800000).value == 3.75e-6

    def test_one_error(self):
        assert clamp_sample(1, 800000).value == 3.75e-6

    def test_above_floor(self):
        assert clamp_sample(5, 800000).value == 6.25e-6

    def test_too_few_bits(self):
        with pytest.raises(ValueError):
            clamp_sample(0, 2)

    @given(st.integers(0, 10**6), st.integers(3, 10**7))
    def test_value_rule(self, errors, bits):
        if errors > bits:
            with pytest.raises(ValueError):
                BerSample(errors, bits)
            return
        s = BerSample(errors, bits)
        assert s.value == max(errors, 3) / bits
        assert 0 < s.value <= 1


class TestPointEstimate:
    def test_identical(self):
        e = point_estimate([0.5, 0.5])
        assert (e.mean, e.variance, e.n) == (0.5, 0.0, 2)

    def test_clamped_blocks(self):
        e = point_estimate([clamp_sample(0, 800000), clamp_sample(2, 800000)])
        assert e.mean == 3.75e-6 and e.variance == 0.0

    def test_worked_variance(self):
        # six values with mean 5e-4 and sample sd 8.87e-4
        z = np.array([-1.5, -1.0, -0.5, 0.5, 1.0, 1.5])
        z = z / z.std(ddof=1)
        vals = 5e-4 + 8.87e-4 * z
        e = point_estimate(list(vals))
        assert e.n == 6
        assert e.mean == pytest.approx(5e-4, rel=1e-12)
        assert e.variance == pytest.approx(7.868e-7, rel=1e-4)

    def test_needs_two(self):
        with pytest.raises(InsufficientDataError):
            point_estimate([0.1])

    @given(st.lists(st.floats(1e-9, 0.5), min_size=2, max_size=60))
    def test_two_pass(self, vals):
        e = point_estimate(vals)
        m = sum(vals) / len(vals)
        v = sum((x - m) ** 2 for x in vals) / (len(vals) - 1)
        assert e.mean == pytest.approx(m, rel=1e-12)
        assert e.variance == pytest.approx(v, rel=1e-9, abs=1e-30)


class TestConfidence:
    def test_worked_example(self):
        assert confidence_below(est(5e-4, 8.87e-4, 6), 1e-3) == pytest.approx(WORKED_CONFIDENCE, abs=1e-10)

    def test_degenerate(self):
        assert confidence_below(PointEstimate(3.75e-6, 0.0, 2), 1e-3) == 1.0
        assert confidence_below(PointEstimate(2e-3, 0.0, 2), 1e-3) == 0.0
        assert confidence_below(PointEstimate(1e-3, 0.0, 2), 1e-3) == 0.5

    @given(st.floats(1e-6, 1e-2), st.floats(0, 1e-3), st.floats(1e-7, 1e-3), st.integers(2, 60), st.floats(1e-5, 1e-2))
    def test_monotone(self, mean, dm, sd, n, T):
        a = confidence_below(est(mean, sd, n), T)
        b = confidence_below(est(mean + dm, sd, n), T)
        c = confidence_below(est(mean, sd, n), T + dm)
        assert b <= a + 1e-15
        assert c >= a - 1e-15


class TestRules:
    cfg = StoppingConfig()

    def test_defaults(self):
        assert (self.cfg.beta, self.cfg.gamma, self.cfg.t_threshold, self.cfg.max_samples) == (0.1, 0.9, 1e-4, 50)

    def test_relative_accuracy_oracle_values(self):
        assert 2 * student_t_cdf(2.0, 3) - 1 == pytest.approx(F3_2_TWO_SIDED, abs=1e-12)
        assert 2 * student_t_cdf(3.0, 8) - 1 == pytest.approx(F8_3_TWO_SIDED, abs=1e-12)

    def test_relative_accuracy(self):
        assert not rule_relative_accuracy(est(1e-3, 1e-4, 4), self.cfg)
        assert rule_relative_accuracy(est(1e-3, 1e-4, 9), self.cfg)
        assert rule_relative_accuracy(PointEstimate(0.2, 0.0, 2), self.cfg)

    def test_threshold(self):
        worked = StoppingConfig(t_threshold=1e-3)
        assert not rule_threshold(est(5e-4, 8.87e-4, 6), worked)
        assert rule_threshold(PointEstimate(3.75e-6, 0.0, 2), self.cfg)
        assert not rule_threshold(est(2e-4, 1e-5, 4), self.cfg)

    @given(st.floats(1e-6, 0.5), st.floats(1e-8, 1.0), st.integers(2, 200))
    def test_relative_accuracy_monotone_in_n(self, mean, rel_sd, n):
        e1 = est(mean, mean * rel_sd, n)
        e2 = est(mean, mean * rel_sd, n + 1)
        if rule_relative_accuracy(e1, self.cfg):
            assert rule_relative_accuracy(e2, self.cfg)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            StoppingConfig(beta=0.0)
        with pytest.raises(ValueError):
            StoppingConfig(min_samples=1)
        with pytest.raises(ValueError):
            StoppingConfig(max_samples=2, min_samples=3)
