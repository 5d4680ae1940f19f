import json

import numpy as np
import pytest

from newsmacro.econometrics import (
    ALL_VARIANTS,
    BM1,
    BM2,
    BM3,
    MODEL,
    TimeSeriesFrame,
    forecast_suite,
    walk_forward_folds,
)
from newsmacro.errors import DimensionMismatch, InsufficientData
from newsmacro.monthgrid import month_label, month_ordinal


def _months(T, start="2015-04"):
    base = month_ordinal(start)
    return tuple(month_label(base + i) for i in range(T))


class ArrayPanel:
    """Minimal stand-in honouring the sentiment-panel interface."""

    def __init__(self, diffs, months):
        self.diffs = np.asarray(diffs, dtype=float)
        self.months = tuple(months)
        self.score_names = tuple(f"s{i}" for i in range(self.diffs.shape[1]))

    def standardized(self, fit_rows, clip=8.0):
        window = self.diffs[:fit_rows]
        means = window.mean(axis=0)
        scales = window.std(axis=0)
        scales = np.where(scales == 0.0, 1.0, scales)
        values = (self.diffs - means) / scales
        values[fit_rows:] = np.clip(values[fit_rows:], -clip, clip)
        return values


def _signal_world(seed, T=63, K=24, gain=1.2):
    """Target driven by one latent mood that also loads half the panel."""
    rng = np.random.default_rng(seed)
    latent = rng.normal(0, 1, T)
    loadings = np.concatenate([rng.uniform(0.5, 1.0, K // 2), np.zeros(K - K // 2)])
    panel_values = latent[:, None] * loadings[None, :] + rng.normal(0, 0.4, (T, K))
    controls = rng.normal(0, 1, (T, 2))
    y = np.zeros(T)
    for t in range(1, T):
        y[t] = 0.25 * y[t - 1] + gain * latent[t - 1] + \
            0.15 * controls[t - 1, 0] + rng.normal(0, 0.5)
    months = _months(T)
    frame = TimeSeriesFrame(months=months, columns=("y", "c1", "c2"),
                            values=np.column_stack([y, controls]),
                            target="y", controls=("c1", "c2"))
    panel = ArrayPanel(panel_values, months)
    noise_panel = ArrayPanel(rng.normal(0, 1, (T, K)), months)
    tone = 0.3 * latent + rng.normal(0, 0.8, T)
    return frame, panel, noise_panel, tone


def test_walk_forward_folds_are_expanding_blocks():
    folds = walk_forward_folds(63, 4)
    assert len(folds) == 3
    sizes = {len(np.concatenate([t, v])) for t, v in [folds[-1]]}
    for k, (train, valid) in enumerate(folds, start=1):
        assert train[0] == 0
        assert train[-1] + 1 == valid[0]  # contiguous expanding window
        assert np.array_equal(train, np.arange(train.size))
    blocks = [folds[0][0].size] + [v.size for _, v in folds]
    assert max(blocks) - min(blocks) <= 1
    assert sum(blocks) == 63


def test_walk_forward_too_short():
    with pytest.raises(InsufficientData):
        walk_forward_folds(3, 5)


def test_planted_signal_model_beats_benchmarks():
    frame, panel, noise_panel, tone = _signal_world(0)
    report = forecast_suite(frame, panel, ALL_VARIANTS,
                            unfiltered_panel=noise_panel, tone=tone)
    assert report.rmse(MODEL) < report.rmse(BM1)
    assert report.rmse(MODEL) < report.rmse(BM2)
    assert report.dm_vs_benchmarks[BM1].p_value < 0.1
    assert report.lag_order >= 1
    assert report.n_validation == 47  # 63 rows, first block held for training


def test_noise_panel_overfits_on_average():
    diffs = []
    for seed in range(30):
        frame, _, noise_panel, _ = _signal_world(seed, gain=0.0)
        report = forecast_suite(frame, noise_panel, (MODEL, BM1))
        diffs.append(report.rmse(MODEL) - report.rmse(BM1))
    assert np.mean(diffs) > 0.0


def test_zero_variance_target_constant_forecast():
    T = 40
    months = _months(T)
    rng = np.random.default_rng(1)
    frame = TimeSeriesFrame(months=months, columns=("y", "c1"),
                            values=np.column_stack([np.full(T, 2.5),
                                                    rng.normal(0, 1, T)]),
                            target="y", controls=("c1",))
    panel = ArrayPanel(rng.normal(0, 1, (T, 5)), months)
    report = forecast_suite(frame, panel, (MODEL, BM1), tone=rng.normal(0, 1, T))
    assert report.rmse(MODEL) == 0.0
    assert report.rmse(BM1) == 0.0
    assert report.dm_vs_benchmarks[BM1].degenerate
    assert report.dm_vs_benchmarks[BM1].p_value == 1.0


def test_deterministic_given_inputs():
    frame, panel, noise_panel, tone = _signal_world(2)
    a = forecast_suite(frame, panel, ALL_VARIANTS,
                       unfiltered_panel=noise_panel, tone=tone)
    b = forecast_suite(frame, panel, ALL_VARIANTS,
                       unfiltered_panel=noise_panel, tone=tone)
    assert a.to_dict() == b.to_dict()
    for variant in ALL_VARIANTS:
        assert np.array_equal(a.variant_results[variant].errors,
                              b.variant_results[variant].errors)


def test_variant_requirements_enforced():
    frame, panel, _, _ = _signal_world(3)
    with pytest.raises(ValueError):
        forecast_suite(frame, None, (MODEL,))
    with pytest.raises(ValueError):
        forecast_suite(frame, panel, (MODEL, BM2))
    with pytest.raises(ValueError):
        forecast_suite(frame, panel, (MODEL, BM3))
    with pytest.raises(ValueError):
        forecast_suite(frame, panel, ("BM9",))


def test_misaligned_panel_rejected():
    frame, panel, _, _ = _signal_world(4)
    shifted = ArrayPanel(panel.diffs, _months(63, start="2015-05"))
    with pytest.raises(DimensionMismatch):
        forecast_suite(frame, shifted, (MODEL, BM1))


def test_significance_counts_consistent_with_p_values():
    frame, panel, noise_panel, tone = _signal_world(5)
    report = forecast_suite(frame, panel, ALL_VARIANTS,
                            unfiltered_panel=noise_panel, tone=tone)
    model_result = report.variant_results[MODEL]
    assert len(model_result.factor_p_values) == 3 * report.lag_order
    counted = sum(model_result.significant_counts.values())
    assert counted == sum(1 for p in model_result.factor_p_values if p < 0.1)
    assert report.variant_results[BM1].factor_p_values == ()
    assert sum(report.variant_results[BM1].significant_counts.values()) == 0
    assert len(report.variant_results[BM3].factor_p_values) == report.lag_order


def test_pls_scores_nearly_uncorrelated_with_base_fit():
    """The exact orthogonality is residuals vs fit; factor scores are only
    zero-correlated with the step-1 fit up to sampling noise, so the band
    is 4/sqrt(T) rather than a fixed constant."""
    frame, panel, _, _ = _signal_world(6)
    report = forecast_suite(frame, panel, (MODEL, BM1))
    pls = report.pls_model
    y = frame.target_values
    from newsmacro.econometrics.forecast import _fit_adl
    p = report.lag_order
    _, residuals, rows = _fit_adl(y, frame.control_values, p,
                                  np.arange(y.size))
    fitted = y[rows] - residuals
    assert abs(np.corrcoef(residuals, fitted)[0, 1]) < 1e-8
    band = 4.0 / np.sqrt(rows.size)
    for a in range(pls.n_components):
        corr = np.corrcoef(pls.scores[:, a], fitted)[0, 1]
        assert abs(corr) < band


def test_report_serializes_to_json(tmp_path):
    frame, panel, noise_panel, tone = _signal_world(7)
    report = forecast_suite(frame, panel, ALL_VARIANTS,
                            unfiltered_panel=noise_panel, tone=tone)
    payload = report.to_dict()
    text = json.dumps(payload, sort_keys=True)
    assert json.loads(text) == payload
