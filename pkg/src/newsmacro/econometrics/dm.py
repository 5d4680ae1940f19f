"""Equal-forecast-accuracy test with the Harvey-Leybourne-Newbold correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import InsufficientData


@dataclass(frozen=True)
class DmResult:
    statistic: float
    p_value: float
    horizon: int
    n_obs: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "p_value": self.p_value,
                "horizon": self.horizon, "n_obs": self.n_obs,
                "degenerate": self.degenerate}


def dm_test(errors_a, errors_b, h: int = 1) -> DmResult:
    """Compare two forecast-error series under squared-error loss.

    The loss differential d_t = e_a^2 - e_b^2 is tested against zero
    mean with an autocovariance long-run variance truncated at h-1, the
    small-sample correction factor sqrt((T+1-2h+h(h-1)/T)/T), and a
    two-sided Student-t p-value on T-1 degrees of freedom. When every
    d_t is identical the statistic is undefined; the result is flagged
    degenerate with p = 1 instead of dividing by zero.
    """
    e_a = np.asarray(errors_a, dtype=float)
    e_b = np.asarray(errors_b, dtype=float)
    if e_a.shape != e_b.shape or e_a.ndim != 1:
        raise ValueError("error series must be one-dimensional and equal length")
    T = e_a.size
    if T < 10:
        raise InsufficientData(f"need at least 10 forecast errors, got {T}")
    if h < 1:
        raise ValueError("horizon must be at least 1")

    d = e_a ** 2 - e_b ** 2
    if np.all(d == d[0]):
        return DmResult(statistic=0.0, p_value=1.0, horizon=h, n_obs=T,
                        degenerate=True)

    d_bar = d.mean()
    centred = d - d_bar
    gamma0 = float(centred @ centred) / T
    long_run = gamma0
    for lag in range(1, h):
        long_run += 2.0 * float(centred[lag:] @ centred[:-lag]) / T
    if long_run <= 0.0:
        return DmResult(statistic=0.0, p_value=1.0, horizon=h, n_obs=T,
                        degenerate=True)

    statistic = d_bar / np.sqrt(long_run / T)
    statistic *= np.sqrt((T + 1 - 2 * h + h * (h - 1) / T) / T)
    p_value = 2.0 * float(stats.t.sf(abs(statistic), df=T - 1))
    return DmResult(statistic=float(statistic), p_value=p_value,
                    horizon=h, n_obs=T)
