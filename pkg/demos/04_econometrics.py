"""Tour of the statistical core: ADF, Granger+FDR, SIMPLS, DM."""

import numpy as np

from newsmacro.econometrics import (
    SCORE_TO_TARGET,
    adf_test,
    dm_test,
    factor_cv,
    fit_simpls,
    granger_tests,
)

rng = np.random.default_rng(0)

print("== ADF unit-root test ==")
noise = rng.normal(0, 1, 240)
walk = np.cumsum(rng.normal(0, 1, 240))
for name, series in (("white noise", noise), ("random walk", walk)):
    result = adf_test(series, max_lag=4)
    print(f"{name:12s} t={result.t_stat:7.3f} lag={result.used_lag} "
          f"reject@5%={result.reject_at_5pct}")

print("\n== Granger causality with FDR control ==")
x = rng.normal(0, 1, 64)
y = np.zeros(64)
for t in range(1, 64):
    y[t] = 0.8 * x[t - 1] + rng.normal(0, 1)


class OneScore:
    values = x[:, None]
    score_names = ("planted_score",)


for r in granger_tests(OneScore(), y, max_lag=3):
    if r.direction == SCORE_TO_TARGET:
        print(f"lag {r.lag}: F={r.f_stat:7.2f} p={r.p_value:.2e} "
              f"adjusted={r.adjusted_p:.2e}")

print("\n== SIMPLS factor extraction ==")
F = rng.normal(0, 1, (100, 3))
X = F @ rng.normal(0, 1, (3, 40)) + rng.normal(0, 0.3, (100, 40))
target = F @ np.array([1.0, -0.8, 0.6])
model = fit_simpls(X, target, 5)
print("cumulative explained variance:",
      [round(float(v), 4) for v in model.explained_variance])
print("score orthogonality max |t_a . t_b|:",
      f"{np.abs(model.scores.T @ model.scores - np.eye(5)).max():.2e}")
rows = factor_cv(X, target, range(0, 6), n_folds=5)
print("component count -> CV RSS:",
      {r.n_components: round(r.cv_rss, 2) for r in rows})

print("\n== Modified Diebold-Mariano test ==")
good = rng.normal(0, 1, 60)
bad = rng.normal(0, 2, 60)
result = dm_test(bad, good)
print(f"worse vs better forecasts: DM={result.statistic:.3f} "
      f"p={result.p_value:.4f}")
same = dm_test(good, good.copy())
print(f"identical forecasts: degenerate={same.degenerate} p={same.p_value}")
