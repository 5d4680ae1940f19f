import numpy as np
import pytest

from conftest import normal_equations
from newsmacro.econometrics import TimeSeriesFrame, fit_var, select_lag
from newsmacro.errors import InsufficientData, SingularDesign


def _simulate_var1(rng, A, T, noise_sd=1.0):
    K = A.shape[0]
    Y = np.zeros((T, K))
    for t in range(1, T):
        Y[t] = A @ Y[t - 1] + rng.normal(0, noise_sd, K)
    return Y


A3 = np.array([[0.5, 0.1, 0.0],
               [0.0, 0.3, 0.2],
               [0.1, 0.0, 0.4]])


def test_univariate_slope_matches_normal_equations_oracle():
    rng = np.random.default_rng(0)
    y = _simulate_var1(rng, np.array([[0.6]]), 150)[:, 0]
    model = fit_var(y, 1)
    X = np.column_stack([np.ones(149), y[:-1]])
    oracle = normal_equations(X, y[1:])
    assert model.intercept[0] == pytest.approx(oracle[0], abs=1e-10)
    assert model.coef[0, 0, 0] == pytest.approx(oracle[1], abs=1e-10)


def test_matches_oracle_on_random_instances():
    rng = np.random.default_rng(1)
    for _ in range(50):
        K = int(rng.integers(1, 4))
        p = int(rng.integers(1, 4))
        if K * p > 10:
            continue
        T = int(rng.integers(K * p + 20, 200))
        Y = rng.normal(0, 1, (T, K))
        model = fit_var(Y, p)
        Z = np.ones((T - p, 1 + K * p))
        for i in range(1, p + 1):
            Z[:, 1 + (i - 1) * K: 1 + i * K] = Y[p - i: T - i]
        for eq in range(K):
            oracle = normal_equations(Z, Y[p:, eq])
            ours = np.concatenate([[model.intercept[eq]],
                                   model.coef[:, eq, :].reshape(-1)])
            assert np.allclose(ours, oracle, rtol=1e-8, atol=1e-10)


def test_var1_coefficient_recovery():
    rng = np.random.default_rng(2)
    Y = _simulate_var1(rng, A3, 500, noise_sd=0.1)
    model = fit_var(Y, 1)
    assert np.abs(model.coef[0] - A3).max() < 0.1


def test_white_noise_coefficients_within_three_standard_errors():
    rng = np.random.default_rng(3)
    Y = rng.normal(0, 1, (400, 3))
    model = fit_var(Y, 1)
    Z = np.column_stack([np.ones(399), Y[:-1]])
    xtx_inv = np.linalg.inv(Z.T @ Z)
    outside = 0
    for eq in range(3):
        resid = model.residuals[:, eq]
        sigma2 = resid @ resid / (399 - 4)
        se = np.sqrt(np.diag(xtx_inv) * sigma2)[1:]
        outside += np.sum(np.abs(model.coef[0, eq, :]) > 3 * se)
    assert outside == 0


def test_residuals_orthogonal_to_regressors():
    rng = np.random.default_rng(4)
    Y = _simulate_var1(rng, A3, 300)
    model = fit_var(Y, 2)
    T = Y.shape[0]
    Z = np.ones((T - 2, 1 + 3 * 2))
    for i in range(1, 3):
        Z[:, 1 + (i - 1) * 3: 1 + i * 3] = Y[2 - i: T - i]
    cross = Z.T @ model.residuals
    scale = np.linalg.norm(Z, axis=0)[:, None] * \
        np.linalg.norm(model.residuals, axis=0)[None, :]
    assert np.abs(cross / scale).max() < 1e-8


def test_model_shapes_and_fit_quality():
    rng = np.random.default_rng(5)
    Y = _simulate_var1(rng, A3, 120)
    model = fit_var(Y, 3)
    assert model.coef.shape == (3, 3, 3)
    assert model.residuals.shape == (117, 3)
    assert model.fitted.shape == (117, 3)
    assert np.allclose(model.fitted + model.residuals, Y[3:])
    assert model.sigma_u.shape == (3, 3)
    assert model.n_obs == 117


def test_loglik_term_non_increasing_in_lag():
    rng = np.random.default_rng(6)
    Y = _simulate_var1(rng, A3, 200)
    p_max = 4
    logdets = []
    for p in range(1, p_max + 1):
        model = fit_var(Y[p_max - p:], p)
        sign, logdet = np.linalg.slogdet(model.sigma_u)
        assert sign > 0
        logdets.append(logdet)
    assert all(b <= a + 1e-10 for a, b in zip(logdets, logdets[1:]))


def test_select_lag_var1():
    rng = np.random.default_rng(7)
    hits = sum(select_lag(_simulate_var1(rng, A3, 200), 4) == 1
               for _ in range(40))
    assert hits >= 34


def test_select_lag_var2_with_strong_second_lag():
    rng = np.random.default_rng(8)
    A1 = np.array([[0.3, 0.0], [0.0, 0.2]])
    A2 = np.array([[0.0, 0.45], [0.45, 0.0]])
    hits = 0
    for _ in range(40):
        Y = np.zeros((200, 2))
        for t in range(2, 200):
            Y[t] = A1 @ Y[t - 1] + A2 @ Y[t - 2] + rng.normal(0, 1, 2)
        hits += select_lag(Y, 4) == 2
    assert hits >= 32


def test_select_lag_pmax_one():
    Y = np.random.default_rng(9).normal(0, 1, (50, 2))
    assert select_lag(Y, 1) == 1


def test_insufficient_data():
    Y = np.random.default_rng(10).normal(0, 1, (8, 3))
    with pytest.raises(InsufficientData):
        fit_var(Y, 2)


def test_singular_design():
    rng = np.random.default_rng(11)
    col = rng.normal(0, 1, 100)
    Y = np.column_stack([col, col])  # perfectly collinear system
    with pytest.raises(SingularDesign):
        fit_var(Y, 1)


def test_frame_validation():
    months = ("2015-03", "2015-04", "2015-05")
    values = np.zeros((3, 2))
    frame = TimeSeriesFrame(months=months, columns=("y", "c"), values=values,
                            target="y", controls=("c",))
    assert frame.target_values.shape == (3,)
    with pytest.raises(ValueError):
        TimeSeriesFrame(months=months, columns=("y", "c"), values=values,
                        target="missing", controls=())
    with pytest.raises(ValueError):
        TimeSeriesFrame(months=("2015-03", "2015-05", "2015-06"),
                        columns=("y", "c"), values=values,
                        target="y", controls=())
    with pytest.raises(ValueError):
        TimeSeriesFrame(months=months, columns=("y", "c"),
                        values=values * np.nan, target="y", controls=())
