"""Vector autoregression: Y_t = v + A_1 Y_{t-1} + ... + A_p Y_{t-p} + u_t."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientData, SingularDesign
from ..monthgrid import months_consecutive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeSeriesFrame:
    """Aligned monthly series with a designated forecast target."""

    months: tuple[str, ...]
    columns: tuple[str, ...]
    values: np.ndarray  # T x C
    target: str
    controls: tuple[str, ...]

    def __post_init__(self):
        if self.values.shape != (len(self.months), len(self.columns)):
            raise ValueError("values shape does not match months x columns")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("frame contains non-finite values")
        if len(self.months) > 1 and not months_consecutive(self.months):
            raise ValueError("months must form a regular monthly grid")
        for name in (self.target, *self.controls):
            if name not in self.columns:
                raise ValueError(f"column {name!r} not in frame")

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    @property
    def target_values(self) -> np.ndarray:
        return self.column(self.target)

    @property
    def control_values(self) -> np.ndarray:
        return np.column_stack([self.column(c) for c in self.controls]) \
            if self.controls else np.empty((len(self.months), 0))


@dataclass(frozen=True)
class VarModel:
    lag_order: int
    var_names: tuple[str, ...]
    intercept: np.ndarray      # (K,)
    coef: np.ndarray           # (p, K, K); coef[i][eq, var] multiplies Y_{t-1-i}[var]
    residuals: np.ndarray      # (T-p, K)
    fitted: np.ndarray         # (T-p, K)
    sigma_u: np.ndarray        # (K, K), maximum-likelihood residual covariance
    aic: float
    bic: float
    n_obs: int

    def target_residuals(self, index: int = 0) -> np.ndarray:
        return self.residuals[:, index]


def _stack_lags(Y: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Design [1, Y_{t-1}, ..., Y_{t-p}] and response Y_t for t = p..T-1."""
    T, K = Y.shape
    rows = T - p
    Z = np.empty((rows, 1 + K * p))
    Z[:, 0] = 1.0
    for i in range(1, p + 1):
        Z[:, 1 + (i - 1) * K: 1 + i * K] = Y[p - i: T - i]
    return Z, Y[p:]


def _values_of(frame) -> tuple[np.ndarray, tuple[str, ...]]:
    if hasattr(frame, "values") and hasattr(frame, "columns"):
        return np.asarray(frame.values, dtype=float), tuple(frame.columns)
    values = np.asarray(frame, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    return values, tuple(f"y{i}" for i in range(values.shape[1]))


def fit_var(frame, p: int) -> VarModel:
    """Equation-by-equation OLS estimation of the lag-p system.

    The information criteria use the maximum-likelihood residual
    covariance: AIC = ln|Sigma| + 2(K^2 p + K)/T_eff and BIC replaces
    the 2 with ln(T_eff).
    """
    Y, names = _values_of(frame)
    T, K = Y.shape
    if p < 1:
        raise ValueError("lag order must be at least 1")
    if T - p <= K * p + 1:
        raise InsufficientData(
            f"{T} observations cannot identify a K={K}, p={p} system")

    Z, target = _stack_lags(Y, p)
    beta, _, rank, _ = np.linalg.lstsq(Z, target, rcond=None)  # (1+Kp) x K
    if rank < Z.shape[1]:
        raise SingularDesign(f"lag design rank {rank} < {Z.shape[1]} columns")
    fitted = Z @ beta
    residuals = target - fitted
    t_eff = T - p
    sigma_u = residuals.T @ residuals / t_eff
    sign, logdet = np.linalg.slogdet(sigma_u)
    if sign <= 0:
        logdet = -np.inf
    n_params = K * K * p + K
    aic = float(logdet + 2.0 * n_params / t_eff)
    bic = float(logdet + np.log(t_eff) * n_params / t_eff)

    coef = np.empty((p, K, K))
    for i in range(p):
        coef[i] = beta[1 + i * K: 1 + (i + 1) * K, :].T

    return VarModel(
        lag_order=p,
        var_names=names,
        intercept=beta[0],
        coef=coef,
        residuals=residuals,
        fitted=fitted,
        sigma_u=sigma_u,
        aic=aic,
        bic=bic,
        n_obs=t_eff,
    )


def select_lag(frame, p_max: int) -> int:
    """Information-criterion lag choice over p = 1..p_max.

    Candidates are fit on a common estimation sample (the rows a lag of
    p_max leaves usable) so their criteria are comparable. When the AIC
    and BIC favourites disagree the smaller order wins and the
    disagreement is logged.
    """
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    Y, _ = _values_of(frame)
    aics, bics = [], []
    for p in range(1, p_max + 1):
        model = fit_var(Y[p_max - p:], p)
        aics.append(model.aic)
        bics.append(model.bic)
    p_aic = 1 + int(np.argmin(aics))
    p_bic = 1 + int(np.argmin(bics))
    if p_aic != p_bic:
        logger.info("lag selection disagreement: AIC prefers %d, BIC %d; "
                    "using %d", p_aic, p_bic, min(p_aic, p_bic))
    return min(p_aic, p_bic)
