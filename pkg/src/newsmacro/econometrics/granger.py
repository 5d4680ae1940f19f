"""Granger causality between sentiment scores and a macro series."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from ..errors import InsufficientData, SingularDesign
from .fdr import bh_adjust
from .ols import ols_regression

SCORE_TO_TARGET = "score_to_target"
TARGET_TO_SCORE = "target_to_score"


@dataclass(frozen=True)
class GrangerResult:
    score: str
    lag: int
    direction: str
    f_stat: float
    p_value: float
    adjusted_p: float
    untestable: bool = False

    def to_dict(self) -> dict:
        return {"score": self.score, "lag": self.lag, "direction": self.direction,
                "f_stat": self.f_stat, "p_value": self.p_value,
                "adjusted_p": self.adjusted_p, "untestable": self.untestable}


def granger_f_test(cause: np.ndarray, effect: np.ndarray, lag: int,
                   ) -> tuple[float, float]:
    """Nested-OLS F test that ``cause`` lags improve ``effect`` forecasts.

    Restricted model: effect on its own first ``lag`` lags plus a
    constant; unrestricted adds the same lags of ``cause``.
    """
    x = np.asarray(cause, dtype=float)
    y = np.asarray(effect, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("series must be one-dimensional and equal length")
    T = y.size
    rows = np.arange(lag, T)
    n = rows.size
    k_u = 1 + 2 * lag
    if n <= k_u:
        raise InsufficientData(f"{T} observations too few for lag {lag}")

    restricted = np.empty((n, 1 + lag))
    restricted[:, 0] = 1.0
    for i in range(1, lag + 1):
        restricted[:, i] = y[rows - i]
    unrestricted = np.empty((n, k_u))
    unrestricted[:, :1 + lag] = restricted
    for i in range(1, lag + 1):
        unrestricted[:, lag + i] = x[rows - i]

    _, _, rss_r = ols_regression(restricted, y[rows])
    _, _, rss_u = ols_regression(unrestricted, y[rows])

    if rss_u <= 0.0:
        raise SingularDesign("unrestricted regression fits perfectly")
    f_stat = ((rss_r - rss_u) / lag) / (rss_u / (n - k_u))
    f_stat = max(f_stat, 0.0)
    p_value = float(stats.f.sf(f_stat, lag, n - k_u))
    return float(f_stat), p_value


def granger_tests(panel, target, max_lag: int = 3) -> list[GrangerResult]:
    """All (score, lag, direction) tests with FDR-adjusted p-values.

    Adjustment families are the testable p-values within one direction.
    Collinear designs make a (score, lag) untestable; such results are
    reported with NaN statistics rather than silently dropped.
    """
    y = np.asarray(target, dtype=float)
    values = np.asarray(panel.values, dtype=float)
    names = tuple(panel.score_names)
    if values.shape[0] != y.size:
        raise ValueError(
            f"panel has {values.shape[0]} rows, target {y.size}")
    if y.size <= 3 * max_lag + 5:
        raise InsufficientData(
            f"need more than {3 * max_lag + 5} observations, got {y.size}")

    results: list[GrangerResult] = []
    for direction in (SCORE_TO_TARGET, TARGET_TO_SCORE):
        for j, name in enumerate(names):
            x = values[:, j]
            cause, effect = (x, y) if direction == SCORE_TO_TARGET else (y, x)
            for lag in range(1, max_lag + 1):
                try:
                    f_stat, p_value = granger_f_test(cause, effect, lag)
                except SingularDesign:
                    results.append(GrangerResult(
                        score=name, lag=lag, direction=direction,
                        f_stat=float("nan"), p_value=float("nan"),
                        adjusted_p=float("nan"), untestable=True))
                else:
                    results.append(GrangerResult(
                        score=name, lag=lag, direction=direction,
                        f_stat=f_stat, p_value=p_value, adjusted_p=float("nan")))

    for direction in (SCORE_TO_TARGET, TARGET_TO_SCORE):
        indices = [i for i, r in enumerate(results)
                   if r.direction == direction and not r.untestable]
        if not indices:
            continue
        adjusted = bh_adjust([results[i].p_value for i in indices])
        for i, adj in zip(indices, adjusted):
            results[i] = replace(results[i], adjusted_p=float(adj))
    return results


def significant_count(results, level: float = 0.05,
                      direction: str = SCORE_TO_TARGET) -> int:
    """Number of BH-adjusted rejections in one direction."""
    return sum(1 for r in results
               if r.direction == direction and not r.untestable
               and r.adjusted_p < level)
