"""Two-class classifiers over summary vectors, with exact error intervals.

Fisher's linear discriminant is the primary classifier; logistic
regression (IRLS) and k-nearest-neighbour voting serve as cross-checks.
Misclassification counts get exact Clopper-Pearson binomial confidence
intervals, which stay honest at the small test sizes these experiments
use (a zero error count out of 20 still spans up to 14 percent).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.stats import beta as beta_dist

from .errors import NumericalError


# --------------------------------------------------------------------------
# Standardization


@dataclass(frozen=True)
class Standardizer:
    """Per-column z-scoring fitted on training rows (ddof = 1)."""

    mean: NDArray[np.float64]
    std: NDArray[np.float64]

    def apply(self, X: NDArray[np.float64]) -> NDArray[np.float64]:
        X = np.asarray(X, dtype=float)
        return (X - self.mean) / self.std


def fit_standardizer(
    X: NDArray[np.float64], names: Sequence[str] | None = None
) -> Standardizer:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or len(X) < 2:
        raise ValueError("standardizer needs a 2-d array with at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0, ddof=1)
    for j in np.flatnonzero(std == 0):
        col = names[j] if names is not None else f"column {j}"
        raise ValueError(f"constant column cannot be standardized: {col}")
    return Standardizer(mean, std)


def apply_standardizer(s: Standardizer, X: NDArray[np.float64]) -> NDArray[np.float64]:
    return s.apply(X)


# --------------------------------------------------------------------------
# Fisher linear discriminant


@dataclass(frozen=True)
class LdaModel:
    """Linear discriminant: predict class 1 when w . x > threshold."""

    w: NDArray[np.float64]
    threshold: float
    mean0: NDArray[np.float64]
    mean1: NDArray[np.float64]
    pooled_cov: NDArray[np.float64]


def train_lda(X0: NDArray[np.float64], X1: NDArray[np.float64]) -> LdaModel:
    """Fisher discriminant from two row blocks (class 0, class 1).

    The pooled covariance must be invertible, which needs combined
    degrees of freedom n0 + n1 - 2 of at least the feature count.  A
    singular pooled covariance is retried once with a ridge of 1e-8
    before giving up.
    """
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    X1 = np.atleast_2d(np.asarray(X1, dtype=float))
    if X0.shape[1] != X1.shape[1]:
        raise ValueError("class blocks must have the same number of columns")
    n0, p = X0.shape
    n1 = X1.shape[0]
    if n0 < 2 or n1 < 2:
        raise ValueError("each class needs at least 2 rows")
    if n0 + n1 - 2 < p:
        raise ValueError(
            f"too few rows ({n0} + {n1}) to estimate a pooled covariance in {p} dimensions"
        )
    mean0 = X0.mean(axis=0)
    mean1 = X1.mean(axis=0)
    s0 = np.cov(X0, rowvar=False, ddof=1)
    s1 = np.cov(X1, rowvar=False, ddof=1)
    pooled = ((n0 - 1) * np.atleast_2d(s0) + (n1 - 1) * np.atleast_2d(s1)) / (n0 + n1 - 2)
    diff = mean1 - mean0
    try:
        w = np.linalg.solve(pooled, diff)
    except np.linalg.LinAlgError:
        try:
            w = np.linalg.solve(pooled + 1e-8 * np.eye(p), diff)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"singular pooled covariance: {exc}") from exc
    threshold = float(w @ (mean0 + mean1) / 2.0)
    return LdaModel(w, threshold, mean0, mean1, pooled)


def predict_lda(model: LdaModel, X: NDArray[np.float64]) -> NDArray[np.int64]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return (X @ model.w > model.threshold).astype(np.int64)


# --------------------------------------------------------------------------
# Logistic regression


@dataclass(frozen=True)
class LogisticModel:
    coef: NDArray[np.float64]
    intercept: float
    converged: bool
    n_iter: int


def _log_likelihood(eta: NDArray[np.float64], y: NDArray[np.float64]) -> float:
    mu = np.clip(1.0 / (1.0 + np.exp(-eta)), 1e-12, 1 - 1e-12)
    return float(np.sum(y * np.log(mu) + (1 - y) * np.log(1 - mu)))


def train_logistic(
    X0: NDArray[np.float64],
    X1: NDArray[np.float64],
    tol: float = 1e-8,
    max_iter: int = 100,
) -> LogisticModel:
    """Maximum-likelihood logistic fit by iteratively reweighted least squares.

    Step halving keeps the log-likelihood non-decreasing.  When the
    classes are linearly separable the likelihood has no maximizer; the
    fit then runs out of iterations and returns with converged = False
    rather than raising.
    """
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    X1 = np.atleast_2d(np.asarray(X1, dtype=float))
    if X0.shape[1] != X1.shape[1]:
        raise ValueError("class blocks must have the same number of columns")
    X = np.vstack([X0, X1])
    y = np.concatenate([np.zeros(len(X0)), np.ones(len(X1))])
    design = np.column_stack([np.ones(len(X)), X])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise NumericalError("design matrix is rank deficient")

    coef = np.zeros(design.shape[1])
    ll = _log_likelihood(design @ coef, y)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        eta = design @ coef
        mu = np.clip(1.0 / (1.0 + np.exp(-eta)), 1e-12, 1 - 1e-12)
        weight = np.maximum(mu * (1 - mu), 1e-10)
        grad = design.T @ (y - mu)
        hess = design.T @ (design * weight[:, None])
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"singular IRLS system: {exc}") from exc
        # Halve until the likelihood does not decrease.
        scale = 1.0
        for _ in range(50):
            candidate = coef + scale * step
            ll_new = _log_likelihood(design @ candidate, y)
            if ll_new >= ll - 1e-12:
                break
            scale /= 2.0
        else:
            candidate = coef
            ll_new = ll
        if ll_new < ll - 1e-9:
            raise AssertionError("IRLS log-likelihood decreased")
        coef = candidate
        ll = ll_new
        if np.max(np.abs(scale * step)) < tol:
            converged = True
            break
    return LogisticModel(coef[1:].copy(), float(coef[0]), converged, it)


def predict_logistic(model: LogisticModel, X: NDArray[np.float64]) -> NDArray[np.int64]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    eta = model.intercept + X @ model.coef
    return (eta > 0).astype(np.int64)


# --------------------------------------------------------------------------
# k nearest neighbours


def predict_knn(
    train_X: NDArray[np.float64],
    train_y: NDArray[np.int64],
    X: NDArray[np.float64],
    k: int = 5,
) -> NDArray[np.int64]:
    """Majority vote among the k nearest training rows (Euclidean).

    Equidistant neighbours are taken in training row order; a split vote
    goes to class 0.
    """
    train_X = np.atleast_2d(np.asarray(train_X, dtype=float))
    train_y = np.asarray(train_y, dtype=np.int64)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(train_X):
        raise ValueError(f"k = {k} exceeds training size {len(train_X)}")
    if len(train_y) != len(train_X):
        raise ValueError("training labels must match training rows")
    d = np.linalg.norm(X[:, None, :] - train_X[None, :, :], axis=2)
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    votes = train_y[order].sum(axis=1)
    return (votes * 2 > k).astype(np.int64)


def knn_predict(
    train_X: NDArray[np.float64],
    train_y: NDArray[np.int64],
    x: NDArray[np.float64],
    k: int = 5,
) -> int:
    """Single-point version of predict_knn."""
    return int(predict_knn(train_X, train_y, np.asarray(x, dtype=float)[None, :], k)[0])


# --------------------------------------------------------------------------
# Error counting and exact intervals


@dataclass(frozen=True)
class ConfusionCounts:
    """Per-class test totals and error counts."""

    total0: int
    errors0: int
    total1: int
    errors1: int

    @property
    def rate0(self) -> float:
        return self.errors0 / self.total0

    @property
    def rate1(self) -> float:
        return self.errors1 / self.total1

    @property
    def overall_rate(self) -> float:
        return (self.errors0 + self.errors1) / (self.total0 + self.total1)


def misclassification(
    predicted: NDArray[np.int64], truth: NDArray[np.int64]
) -> ConfusionCounts:
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape:
        raise ValueError("predicted and truth must have the same length")
    if not np.isin(predicted, (0, 1)).all() or not np.isin(truth, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    is0 = truth == 0
    is1 = truth == 1
    return ConfusionCounts(
        total0=int(is0.sum()),
        errors0=int((predicted[is0] != 0).sum()),
        total1=int(is1.sum()),
        errors1=int((predicted[is1] != 1).sum()),
    )


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Exact (Clopper-Pearson) confidence interval for a binomial proportion.

    The boundary cases use the one-sided construction: k = 0 gives
    (0, 1 - (1 - level)^(1/n)) and k = n its mirror image.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= k <= n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    alpha = 1.0 - level
    if k == 0:
        return 0.0, 1.0 - alpha ** (1.0 / n)
    if k == n:
        return alpha ** (1.0 / n), 1.0
    lo = float(beta_dist.ppf(alpha / 2.0, k, n - k + 1))
    hi = float(beta_dist.ppf(1.0 - alpha / 2.0, k + 1, n - k))
    return lo, hi


# --------------------------------------------------------------------------
# Model persistence (key-value text, 12 significant digits)


def _fmt_vector(v: NDArray[np.float64]) -> str:
    return " ".join(f"{x:.12g}" for x in np.asarray(v, dtype=float).reshape(-1))


def write_lda_model(
    path: str | os.PathLike,
    model: LdaModel,
    standardizer: Standardizer | None = None,
    feature_names: Sequence[str] | None = None,
    class_labels: tuple[str, str] | None = None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    p = len(model.w)
    lines = ["model lda", f"p {p}"]
    if feature_names is not None:
        lines.append("features " + ",".join(feature_names))
    if class_labels is not None:
        lines.append(f"class0 {class_labels[0]}")
        lines.append(f"class1 {class_labels[1]}")
    lines.append("mean0 " + _fmt_vector(model.mean0))
    lines.append("mean1 " + _fmt_vector(model.mean1))
    lines.append("w " + _fmt_vector(model.w))
    lines.append(f"threshold {model.threshold:.12g}")
    for i in range(p):
        lines.append(f"cov{i} " + _fmt_vector(model.pooled_cov[i]))
    if standardizer is not None:
        lines.append("standardizer_mean " + _fmt_vector(standardizer.mean))
        lines.append("standardizer_std " + _fmt_vector(standardizer.std))
    path.write_text("\n".join(lines) + "\n")


def read_lda_model(
    path: str | os.PathLike,
) -> tuple[LdaModel, Standardizer | None, tuple[str, ...] | None, tuple[str, str] | None]:
    path = Path(path)
    fields: dict[str, str] = {}
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        fields[key] = value
    if fields.get("model") != "lda":
        raise ValueError(f"{path}: not an lda model file")
    p = int(fields["p"])

    def vec(key: str) -> NDArray[np.float64]:
        return np.array([float(x) for x in fields[key].split()])

    cov = np.vstack([vec(f"cov{i}") for i in range(p)])
    model = LdaModel(vec("w"), float(fields["threshold"]), vec("mean0"), vec("mean1"), cov)
    standardizer = None
    if "standardizer_mean" in fields:
        standardizer = Standardizer(vec("standardizer_mean"), vec("standardizer_std"))
    names = tuple(fields["features"].split(",")) if "features" in fields else None
    labels = None
    if "class0" in fields and "class1" in fields:
        labels = (fields["class0"], fields["class1"])
    return model, standardizer, names, labels
