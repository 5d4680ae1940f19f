"""Statistical core: unit-root screening, Granger causality with FDR
control, VAR estimation, SIMPLS factor extraction, walk-forward
forecasting and forecast-accuracy testing."""

from .adf import AdfResult, adf_test
from .dm import DmResult, dm_test
from .fdr import bh_adjust
from .forecast import (
    ALL_VARIANTS,
    BENCHMARKS,
    BM1,
    BM2,
    BM3,
    MODEL,
    ForecastReport,
    VariantResult,
    forecast_suite,
    walk_forward_folds,
)
from .granger import (
    SCORE_TO_TARGET,
    TARGET_TO_SCORE,
    GrangerResult,
    granger_f_test,
    granger_tests,
    significant_count,
)
from .ols import ols_inference, ols_regression
from .pls import FactorCvRow, PlsModel, factor_cv, fit_simpls, pls_on_residuals
from .var import TimeSeriesFrame, VarModel, fit_var, select_lag

__all__ = [
    "AdfResult", "adf_test",
    "DmResult", "dm_test",
    "bh_adjust",
    "ALL_VARIANTS", "BENCHMARKS", "BM1", "BM2", "BM3", "MODEL",
    "ForecastReport", "VariantResult", "forecast_suite", "walk_forward_folds",
    "SCORE_TO_TARGET", "TARGET_TO_SCORE", "GrangerResult",
    "granger_f_test", "granger_tests", "significant_count",
    "ols_inference", "ols_regression",
    "FactorCvRow", "PlsModel", "factor_cv", "fit_simpls", "pls_on_residuals",
    "TimeSeriesFrame", "VarModel", "fit_var", "select_lag",
]
