"""Partial least squares via the SIMPLS construction (single response).

Components maximise covariance between the predictors and the response.
Each weight vector is the current cross-product vector s = X'y after
deflation against the orthonormalised basis of earlier x-loadings;
scores are normalised, which makes them mutually orthonormal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DimensionMismatch, RankDeficiency


@dataclass(frozen=True)
class PlsModel:
    n_components: int
    weights: np.ndarray            # K x A, applied to centred predictors
    x_loadings: np.ndarray         # K x A
    y_loadings: np.ndarray         # (A,)
    scores: np.ndarray             # T x A, orthonormal columns
    x_mean: np.ndarray             # (K,)
    y_mean: float
    explained_variance: np.ndarray  # (A,) cumulative share of response variance
    score_names: tuple[str, ...]

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.x_mean.size:
            raise DimensionMismatch(
                f"{X.shape[1]} predictors, model has {self.x_mean.size}")
        return (X - self.x_mean) @ self.weights

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.y_mean + self.transform(X) @ self.y_loadings

    @property
    def fitted(self) -> np.ndarray:
        return self.y_mean + self.scores @ self.y_loadings

    def to_dict(self) -> dict:
        return {
            "n_components": self.n_components,
            "weights": self.weights.tolist(),
            "x_loadings": self.x_loadings.tolist(),
            "y_loadings": self.y_loadings.tolist(),
            "scores": self.scores.tolist(),
            "x_mean": self.x_mean.tolist(),
            "y_mean": self.y_mean,
            "explained_variance": self.explained_variance.tolist(),
            "score_names": list(self.score_names),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlsModel":
        return cls(
            n_components=int(d["n_components"]),
            weights=np.array(d["weights"]),
            x_loadings=np.array(d["x_loadings"]),
            y_loadings=np.array(d["y_loadings"]),
            scores=np.array(d["scores"]),
            x_mean=np.array(d["x_mean"]),
            y_mean=float(d["y_mean"]),
            explained_variance=np.array(d["explained_variance"]),
            score_names=tuple(d["score_names"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True))

    @classmethod
    def load(cls, path) -> "PlsModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_simpls(X: np.ndarray, y: np.ndarray, n_components: int,
               score_names: tuple[str, ...] | None = None) -> PlsModel:
    """Extract ``n_components`` covariance-maximising components."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise DimensionMismatch(
            f"predictors {X.shape} do not align with response of length {y.size}")
    T, K = X.shape
    if n_components < 1:
        raise ValueError("n_components must be at least 1")
    if n_components > min(T - 1, K):
        raise RankDeficiency(
            f"cannot extract {n_components} components from a {T}x{K} matrix")

    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    Xc = X - x_mean
    yc = y - y_mean

    s = Xc.T @ yc
    s_scale = np.linalg.norm(s)
    yy = float(yc @ yc)
    if s_scale == 0.0 or yy == 0.0:
        raise RankDeficiency("response has no covariance with the predictors")

    weights = np.zeros((K, n_components))
    x_loadings = np.zeros((K, n_components))
    y_loadings = np.zeros(n_components)
    scores = np.zeros((T, n_components))
    basis = np.zeros((K, n_components))  # orthonormalised x-loadings

    for a in range(n_components):
        if np.linalg.norm(s) <= 1e-12 * s_scale:
            raise RankDeficiency(
                f"cross-product vector vanished after {a} of {n_components} components")
        w = s.copy()
        t = Xc @ w
        t_norm = np.linalg.norm(t)
        if t_norm <= 1e-12 * s_scale:
            raise RankDeficiency(f"zero-variance score at component {a + 1}")
        t /= t_norm
        w /= t_norm
        p = Xc.T @ t
        q = float(yc @ t)

        v = p - basis[:, :a] @ (basis[:, :a].T @ p)
        v_norm = np.linalg.norm(v)
        if v_norm <= 1e-12 * np.linalg.norm(p):
            raise RankDeficiency(f"x-loading basis degenerate at component {a + 1}")
        v /= v_norm
        s = s - v * (v @ s)

        weights[:, a] = w
        x_loadings[:, a] = p
        y_loadings[a] = q
        scores[:, a] = t
        basis[:, a] = v

    explained = np.cumsum(y_loadings ** 2) / yy
    names = score_names if score_names is not None \
        else tuple(f"x{i}" for i in range(K))
    if len(names) != K:
        raise DimensionMismatch(f"{len(names)} names for {K} predictors")

    return PlsModel(
        n_components=n_components,
        weights=weights,
        x_loadings=x_loadings,
        y_loadings=y_loadings,
        scores=scores,
        x_mean=x_mean,
        y_mean=y_mean,
        explained_variance=explained,
        score_names=tuple(names),
    )


def pls_on_residuals(benchmark, panel, n_components: int = 3,
                     target_index: int = 0) -> PlsModel:
    """Fit components on the unexplained part of a benchmark fit.

    ``panel`` rows must already be aligned one-to-one with the residual
    rows of the benchmark's target equation.
    """
    residuals = benchmark.target_residuals(target_index)
    X = np.asarray(panel.values, dtype=float)
    if X.shape[0] != residuals.size:
        raise DimensionMismatch(
            f"panel has {X.shape[0]} rows, residuals {residuals.size}")
    return fit_simpls(X, residuals, n_components,
                      score_names=tuple(panel.score_names))


@dataclass(frozen=True)
class FactorCvRow:
    n_components: int
    r_squared: float
    cv_rss: float

    def to_dict(self) -> dict:
        return {"n_components": self.n_components,
                "r_squared": self.r_squared, "cv_rss": self.cv_rss}


def factor_cv(X: np.ndarray, y: np.ndarray, component_range,
              n_folds: int = 4) -> list[FactorCvRow]:
    """In-sample R^2 and leave-fold-out RSS per candidate component count.

    Folds are contiguous blocks, each held out once against a model fit
    on the remaining rows. A component count of zero scores the
    train-mean forecast.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    T = y.size
    folds = np.array_split(np.arange(T), n_folds)
    rows: list[FactorCvRow] = []
    yc = y - y.mean()
    total = float(yc @ yc)

    for a in component_range:
        if a == 0:
            r2 = 0.0
        else:
            model = fit_simpls(X, y, a)
            resid = y - model.fitted
            r2 = 1.0 - float(resid @ resid) / total if total > 0 else 0.0
        rss = 0.0
        for fold in folds:
            mask = np.ones(T, dtype=bool)
            mask[fold] = False
            if a == 0:
                pred = np.full(fold.size, y[mask].mean())
            else:
                model = fit_simpls(X[mask], y[mask], a)
                pred = model.predict(X[fold])
            diff = y[fold] - pred
            rss += float(diff @ diff)
        rows.append(FactorCvRow(n_components=int(a), r_squared=r2, cv_rss=rss))
    return rows
