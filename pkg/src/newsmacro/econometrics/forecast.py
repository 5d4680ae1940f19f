"""Walk-forward forecasting of a macro series with sentiment factors.

Four variants share one autoregressive distributed-lag form (the target
equation of the lag-p system, with exogenous regressors entering at the
same lags):

* ``MODEL`` - controls plus components extracted from the filtered
  sentiment panel;
* ``BM1`` - controls only;
* ``BM2`` - controls plus components from the unfiltered panel;
* ``BM3`` - controls plus the average-tone series.

Factor variants follow a three-step procedure per training window:
fit the controls-only equation, extract covariance-maximising
components from the panel against its residuals, then refit with the
component series appended. Panels are re-standardised and components
re-extracted on each training window so no validation information
leaks backwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, InsufficientData
from .dm import DmResult, dm_test
from .ols import ols_inference, ols_regression
from .pls import PlsModel, fit_simpls
from .var import TimeSeriesFrame, select_lag

MODEL = "MODEL"
BM1 = "BM1"
BM2 = "BM2"
BM3 = "BM3"
ALL_VARIANTS = (MODEL, BM1, BM2, BM3)
BENCHMARKS = (BM1, BM2, BM3)

SIGNIFICANCE_LEVELS = (0.01, 0.05, 0.1)


@dataclass(frozen=True)
class VariantResult:
    rmse: float
    errors: np.ndarray
    factor_p_values: tuple[float, ...]
    significant_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {"rmse": self.rmse, "errors": self.errors.tolist(),
                "factor_p_values": list(self.factor_p_values),
                "significant_counts": self.significant_counts}


@dataclass(frozen=True)
class ForecastReport:
    target: str
    lag_order: int
    variant_results: dict[str, VariantResult]
    dm_vs_benchmarks: dict[str, DmResult]
    validation_months: tuple[str, ...]
    pls_model: PlsModel | None = None

    @property
    def n_validation(self) -> int:
        return len(self.validation_months)

    def rmse(self, variant: str) -> float:
        return self.variant_results[variant].rmse

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "lag_order": self.lag_order,
            "variants": {k: v.to_dict() for k, v in self.variant_results.items()},
            "dm_vs_benchmarks": {k: v.to_dict()
                                 for k, v in self.dm_vs_benchmarks.items()},
            "validation_months": list(self.validation_months),
            "pls_model": self.pls_model.to_dict() if self.pls_model else None,
        }


def walk_forward_folds(n_rows: int, n_blocks: int = 4,
                       ) -> list[tuple[np.ndarray, np.ndarray]]:
    """Expanding-window folds over contiguous blocks.

    Fold k trains on blocks 1..k and validates on block k+1, giving
    ``n_blocks - 1`` validation rounds.
    """
    if n_blocks < 2:
        raise ValueError("need at least 2 blocks")
    blocks = np.array_split(np.arange(n_rows), n_blocks)
    if any(b.size == 0 for b in blocks):
        raise InsufficientData(f"{n_rows} rows cannot fill {n_blocks} blocks")
    folds = []
    for k in range(1, n_blocks):
        train = np.concatenate(blocks[:k])
        folds.append((train, blocks[k]))
    return folds


def _adl_design(y: np.ndarray, exog: np.ndarray, p: int, rows: np.ndarray):
    """Design [1, y lags, exog lags] for the given target rows (all >= p)."""
    m = exog.shape[1]
    X = np.empty((rows.size, 1 + p + p * m))
    X[:, 0] = 1.0
    for i in range(1, p + 1):
        X[:, i] = y[rows - i]
    for i in range(1, p + 1):
        X[:, 1 + p + (i - 1) * m: 1 + p + i * m] = exog[rows - i]
    return X


def _fit_adl(y: np.ndarray, exog: np.ndarray, p: int, train_rows: np.ndarray):
    rows = train_rows[train_rows >= p]
    X = _adl_design(y, exog, p, rows)
    if X.shape[0] <= X.shape[1]:
        raise InsufficientData(
            f"training fold of {X.shape[0]} rows cannot identify "
            f"{X.shape[1]} coefficients")
    beta, residuals, _ = ols_regression(X, y[rows])
    return beta, residuals, rows


def _standardize_window(series: np.ndarray, train_end: int) -> np.ndarray:
    window = series[:train_end]
    scale = window.std()
    return (series - window.mean()) / (scale if scale > 0 else 1.0)


class _FactorBuilder:
    """Per-window component extraction for one panel."""

    def __init__(self, panel, n_components: int):
        self.panel = panel
        self.n_components = n_components

    def factors(self, y: np.ndarray, controls: np.ndarray, p: int,
                train_end: int) -> tuple[np.ndarray, PlsModel]:
        X_std = self.panel.standardized(train_end)
        train_rows = np.arange(train_end)
        _, residuals, used_rows = _fit_adl(y, controls, p, train_rows)
        pls = fit_simpls(X_std[used_rows], residuals, self.n_components,
                         score_names=tuple(self.panel.score_names))
        return pls.transform(X_std), pls


def _variant_exog(variant: str, controls: np.ndarray,
                  factors: np.ndarray | None,
                  tone_std: np.ndarray | None) -> tuple[np.ndarray, list[int]]:
    """Exogenous matrix and the column indices holding sentiment regressors."""
    if variant == BM1:
        return controls, []
    if variant == BM3:
        exog = np.column_stack([controls, tone_std])
        return exog, [exog.shape[1] - 1]
    exog = np.column_stack([controls, factors])
    m = exog.shape[1]
    return exog, list(range(m - factors.shape[1], m))


def _sentiment_coef_columns(p: int, m: int, sentiment_cols: list[int]) -> list[int]:
    return [1 + p + (i - 1) * m + j for i in range(1, p + 1)
            for j in sentiment_cols]


def _bucket_counts(p_values) -> dict[str, int]:
    counts = {str(level): 0 for level in SIGNIFICANCE_LEVELS}
    for p in p_values:
        for level in SIGNIFICANCE_LEVELS:
            if p < level:
                counts[str(level)] += 1
                break
    return counts


def _constant_target_report(frame: TimeSeriesFrame, variants,
                            n_blocks: int) -> ForecastReport:
    y = frame.target_values
    folds = walk_forward_folds(y.size, n_blocks)
    months = tuple(frame.months[i] for _, valid in folds for i in valid)
    n = len(months)
    results = {v: VariantResult(rmse=0.0, errors=np.zeros(n),
                                factor_p_values=(),
                                significant_counts=_bucket_counts([]))
               for v in variants}
    dm = {}
    if MODEL in variants:
        for bench in BENCHMARKS:
            if bench in variants:
                dm[bench] = DmResult(statistic=0.0, p_value=1.0, horizon=1,
                                     n_obs=n, degenerate=True)
    return ForecastReport(target=frame.target, lag_order=1,
                          variant_results=results, dm_vs_benchmarks=dm,
                          validation_months=months)


def forecast_suite(frame: TimeSeriesFrame, panel=None, variants=ALL_VARIANTS,
                   *, unfiltered_panel=None, tone=None, n_components: int = 3,
                   p_max: int = 3, n_blocks: int = 4) -> ForecastReport:
    """One-step-ahead walk-forward evaluation of the requested variants.

    Returns pooled validation RMSE per variant, modified Diebold-Mariano
    p-values of the sentiment model against each benchmark, and counts
    of significant sentiment coefficients from the final full-sample fit.
    """
    unknown = set(variants) - set(ALL_VARIANTS)
    if unknown:
        raise ValueError(f"unknown variants: {sorted(unknown)}")
    if MODEL in variants and panel is None:
        raise ValueError("MODEL variant needs the filtered panel")
    if BM2 in variants and unfiltered_panel is None:
        raise ValueError("BM2 variant needs the unfiltered panel")
    if BM3 in variants and tone is None:
        raise ValueError("BM3 variant needs the tone series")

    y = frame.target_values
    T = y.size
    for pan, label in ((panel, "panel"), (unfiltered_panel, "unfiltered panel")):
        if pan is not None and tuple(pan.months) != tuple(frame.months):
            raise DimensionMismatch(f"{label} months do not match the frame")
    if tone is not None and np.asarray(tone).size != T:
        raise DimensionMismatch("tone series length does not match the frame")

    if np.ptp(y) == 0.0:
        return _constant_target_report(frame, variants, n_blocks)

    system = np.column_stack([y, frame.control_values])
    p = select_lag(system, p_max)

    controls = frame.control_values
    builders = {}
    if MODEL in variants:
        builders[MODEL] = _FactorBuilder(panel, n_components)
    if BM2 in variants:
        builders[BM2] = _FactorBuilder(unfiltered_panel, n_components)
    tone_arr = np.asarray(tone, dtype=float) if tone is not None else None

    folds = walk_forward_folds(T, n_blocks)
    errors: dict[str, list[float]] = {v: [] for v in variants}
    months_validated: list[str] = []

    for train_rows, valid_rows in folds:
        train_end = int(train_rows[-1]) + 1
        window_factors = {v: builders[v].factors(y, controls, p, train_end)[0]
                          for v in builders}
        tone_std = _standardize_window(tone_arr, train_end) \
            if tone_arr is not None else None
        for variant in variants:
            exog, _ = _variant_exog(variant, controls,
                                    window_factors.get(variant), tone_std)
            beta, _, _ = _fit_adl(y, exog, p, train_rows)
            X_valid = _adl_design(y, exog, p, valid_rows)
            predictions = X_valid @ beta
            errors[variant].extend(y[valid_rows] - predictions)
        months_validated.extend(frame.months[i] for i in valid_rows)

    full_extractions = {v: builder.factors(y, controls, p, T)
                        for v, builder in builders.items()}
    tone_std_full = _standardize_window(tone_arr, T) \
        if tone_arr is not None else None
    variant_results: dict[str, VariantResult] = {}
    full_rows = np.arange(T)
    for variant in variants:
        factors = full_extractions[variant][0] if variant in builders else None
        exog, sentiment_cols = _variant_exog(variant, controls, factors,
                                             tone_std_full)
        rows = full_rows[full_rows >= p]
        X = _adl_design(y, exog, p, rows)
        _, _, _, _, p_values = ols_inference(X, y[rows])
        coef_cols = _sentiment_coef_columns(p, exog.shape[1], sentiment_cols)
        factor_ps = tuple(float(p_values[c]) for c in coef_cols)
        err = np.asarray(errors[variant])
        variant_results[variant] = VariantResult(
            rmse=float(np.sqrt(np.mean(err ** 2))),
            errors=err,
            factor_p_values=factor_ps,
            significant_counts=_bucket_counts(factor_ps),
        )

    dm: dict[str, DmResult] = {}
    if MODEL in variants:
        for bench in BENCHMARKS:
            if bench in variants:
                dm[bench] = dm_test(variant_results[MODEL].errors,
                                    variant_results[bench].errors, h=1)

    pls_model = full_extractions[MODEL][1] if MODEL in variants else None

    return ForecastReport(
        target=frame.target,
        lag_order=p,
        variant_results=variant_results,
        dm_vs_benchmarks=dm,
        validation_months=tuple(months_validated),
        pls_model=pls_model,
    )
