"""Least-squares building blocks shared by the estimators."""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..errors import SingularDesign


def ols_regression(X: np.ndarray, y: np.ndarray):
    """Fit y on X; returns (beta, residuals, rss). Rejects rank-deficient X."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise SingularDesign(f"design matrix rank {rank} < {X.shape[1]} columns")
    residuals = y - X @ beta
    rss = float(residuals @ residuals)
    return beta, residuals, rss


def ols_inference(X: np.ndarray, y: np.ndarray):
    """OLS with homoskedastic standard errors and two-sided t-test p-values.

    Returns (beta, residuals, std_errors, t_stats, p_values).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if n <= k:
        raise SingularDesign(f"{n} rows cannot identify {k} coefficients")
    beta, residuals, rss = ols_regression(X, y)
    sigma2 = rss / (n - k)
    xtx_inv = np.linalg.inv(X.T @ X)
    std_errors = np.sqrt(np.clip(np.diag(xtx_inv) * sigma2, 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.where(std_errors > 0, beta / std_errors,
                           np.inf * np.sign(beta))
    p_values = 2.0 * stats.t.sf(np.abs(t_stats), df=n - k)
    return beta, residuals, std_errors, t_stats, p_values
