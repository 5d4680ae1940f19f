"""Augmented Dickey-Fuller unit-root test, constant-only specification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientData, SingularDesign
from .ols import ols_inference, ols_regression

#: Large-sample critical values of the Dickey-Fuller t distribution for a
#: regression with a constant and no trend.
CRITICAL_VALUES = {0.01: -3.43, 0.05: -2.86, 0.10: -2.57}


@dataclass(frozen=True)
class AdfResult:
    t_stat: float
    used_lag: int
    n_obs: int
    reject_at_1pct: bool
    reject_at_5pct: bool
    reject_at_10pct: bool

    def to_dict(self) -> dict:
        return {
            "t_stat": self.t_stat,
            "used_lag": self.used_lag,
            "n_obs": self.n_obs,
            "reject_at_1pct": self.reject_at_1pct,
            "reject_at_5pct": self.reject_at_5pct,
            "reject_at_10pct": self.reject_at_10pct,
        }


def _design(y: np.ndarray, dy: np.ndarray, lag: int, start: int):
    """Rows t = start.. of the regression of dy_t on [1, y_{t-1}, dy lags]."""
    rows = np.arange(start, dy.size)
    X = np.empty((rows.size, 2 + lag))
    X[:, 0] = 1.0
    X[:, 1] = y[rows]          # y_{t-1}: y and dy share the offset convention below
    for i in range(1, lag + 1):
        X[:, 1 + i] = dy[rows - i]
    return X, dy[rows]


def adf_test(series, max_lag: int = 4) -> AdfResult:
    """Test for a unit root against a stationary alternative.

    The augmentation lag is chosen by AIC over 0..max_lag on a common
    estimation sample, then the statistic is refit on all observations
    the chosen lag permits. Rejection compares the t statistic on the
    lagged level against the embedded constant-case critical values.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if y.size < 3 * max_lag + 10:
        raise InsufficientData(
            f"need at least {3 * max_lag + 10} observations, got {y.size}")
    if np.all(y == y[0]):
        raise SingularDesign("series is constant; the level regressor is degenerate")

    dy = np.diff(y)
    levels = y[:-1]  # levels[t] = y_{t-1} aligned with dy[t]

    best_lag, best_aic = 0, np.inf
    for lag in range(0, max_lag + 1):
        X, target = _design(levels, dy, lag, start=max_lag)
        _, _, rss = ols_regression(X, target)
        n = target.size
        aic = n * np.log(rss / n) + 2 * X.shape[1]
        if aic < best_aic:
            best_lag, best_aic = lag, aic

    X, target = _design(levels, dy, best_lag, start=best_lag)
    _, _, _, t_stats, _ = ols_inference(X, target)
    t_stat = float(t_stats[1])

    return AdfResult(
        t_stat=t_stat,
        used_lag=best_lag,
        n_obs=target.size,
        reject_at_1pct=t_stat < CRITICAL_VALUES[0.01],
        reject_at_5pct=t_stat < CRITICAL_VALUES[0.05],
        reject_at_10pct=t_stat < CRITICAL_VALUES[0.10],
    )
