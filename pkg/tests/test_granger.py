import numpy as np
import pytest

from newsmacro.econometrics import (
    SCORE_TO_TARGET,
    TARGET_TO_SCORE,
    bh_adjust,
    granger_f_test,
    granger_tests,
    significant_count,
)
from newsmacro.errors import InsufficientData


class Panel:
    def __init__(self, values, names):
        self.values = values
        self.score_names = names


def _planted_pair(rng, T=64, coef=0.8):
    x = rng.normal(0, 1, T)
    y = np.zeros(T)
    for t in range(1, T):
        y[t] = coef * x[t - 1] + rng.normal(0, 1)
    return x, y


def test_planted_cause_detected_with_adjustment():
    rng = np.random.default_rng(0)
    hits = 0
    for _ in range(20):
        x, y = _planted_pair(rng)
        results = granger_tests(Panel(x[:, None], ("x",)), y, max_lag=3)
        lag1 = [r for r in results
                if r.direction == SCORE_TO_TARGET and r.lag == 1][0]
        hits += lag1.adjusted_p < 0.05
    assert hits >= 18


def test_size_close_to_nominal():
    rng = np.random.default_rng(1)
    rejections = 0
    n = 400
    for _ in range(n):
        x = rng.normal(0, 1, 100)
        y = rng.normal(0, 1, 100)
        _, p = granger_f_test(x, y, 1)
        rejections += p < 0.05
    assert 0.025 <= rejections / n <= 0.08


def test_f_statistic_invariant_under_affine_rescaling():
    rng = np.random.default_rng(2)
    x, y = _planted_pair(rng)
    f_raw, p_raw = granger_f_test(x, y, 2)
    f_scaled, p_scaled = granger_f_test(-3.7 * x + 11.0, y, 2)
    assert f_scaled == pytest.approx(f_raw, rel=1e-10)
    assert p_scaled == pytest.approx(p_raw, rel=1e-10)


def test_shifted_copy_collinearity_and_perfect_prediction():
    rng = np.random.default_rng(3)
    y = rng.normal(0, 1, 80)
    x = np.roll(y, 1)  # x_t == y_{t-1}
    x[0] = 0.0
    results = granger_tests(Panel(x[:, None], ("lagged_copy",)), y, max_lag=3)
    forward = {r.lag: r for r in results if r.direction == SCORE_TO_TARGET}
    reverse = {r.lag: r for r in results if r.direction == TARGET_TO_SCORE}
    # The target predicts its shifted copy exactly at lag 1.
    assert reverse[1].untestable or reverse[1].p_value < 1e-8
    # From lag 2 on, the copy's lags duplicate the target's own lags.
    for lag in (2, 3):
        assert forward[lag].untestable and np.isnan(forward[lag].f_stat)
        assert reverse[lag].untestable
    assert not forward[1].untestable


def test_adjustment_families_are_per_direction():
    rng = np.random.default_rng(4)
    values = rng.normal(0, 1, (90, 4))
    y = rng.normal(0, 1, 90)
    results = granger_tests(Panel(values, tuple("abcd")), y, max_lag=2)
    for direction in (SCORE_TO_TARGET, TARGET_TO_SCORE):
        family = [r for r in results if r.direction == direction]
        assert len(family) == 8
        expected = bh_adjust([r.p_value for r in family])
        assert np.allclose([r.adjusted_p for r in family], expected)
        assert all(r.adjusted_p >= r.p_value - 1e-15 for r in family)


def test_reverse_direction_weaker_for_planted_cause():
    rng = np.random.default_rng(5)
    forward_smaller = 0
    for _ in range(20):
        x, y = _planted_pair(rng)
        results = granger_tests(Panel(x[:, None], ("x",)), y, max_lag=1)
        fwd = [r for r in results if r.direction == SCORE_TO_TARGET][0]
        rev = [r for r in results if r.direction == TARGET_TO_SCORE][0]
        forward_smaller += fwd.p_value < rev.p_value
    assert forward_smaller >= 16


def test_significant_count_helper():
    rng = np.random.default_rng(6)
    x, y = _planted_pair(rng, coef=1.2)
    results = granger_tests(Panel(x[:, None], ("x",)), y, max_lag=3)
    assert significant_count(results, level=0.05) >= 1
    assert significant_count(results, level=1e-300) == 0


def test_insufficient_data():
    rng = np.random.default_rng(7)
    with pytest.raises(InsufficientData):
        granger_tests(Panel(rng.normal(0, 1, (12, 1)), ("x",)),
                      rng.normal(0, 1, 12), max_lag=3)
    with pytest.raises(InsufficientData):
        granger_f_test(np.ones(5), np.ones(5), 2)
