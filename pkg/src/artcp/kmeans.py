"""Symmetric K-means clustering transformation for parametric models.

Alternates membership assignment and per-cluster parameter estimation.
Initialization is a farthest-point variant whose first centroid is the sample
mean, so the whole procedure is a deterministic function of the *multiset* of
observations: everything runs on rows sorted into canonical lexicographic
order, making tie-breaks (first index wins) order-invariant. The cluster
count can be chosen by minimizing a BIC over K = 1..k_max.

Vector data uses squared Euclidean loss and mean centroids; regression data
uses squared residual loss (y - x'f)^2 with per-cluster least-squares
coefficient vectors, bootstrapped from a preliminary clustering of the
y_i * x_i reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .transform import Dataset, ScoreSeries, canonical_order

DEFAULT_K_MAX = 8


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray  # 1-based labels, in the original row order
    centroids: np.ndarray  # (K, d): mean vectors, or regression coefficients
    K: int
    bic: float | None
    iterations: int
    converged: bool
    within_loss: float


def kmeans_scores(
    data: Dataset,
    k: int | str = "auto",
    *,
    k_max: int = DEFAULT_K_MAX,
    loss: str | None = None,
    max_iter: int = 100,
) -> KMeansResult:
    """Cluster the observations and return 1-based group labels.

    ``k="auto"`` selects K in 1..k_max by BIC
    (n/2) * log(total within-cluster loss / n) + K (d + 1) log n.
    """
    if loss is None:
        loss = "squared_regression_residual" if data.kind == "regression" else "squared_euclidean"
    if loss == "squared_euclidean" and data.kind != "vector":
        raise ValueError("squared_euclidean loss requires vector data")
    if loss == "squared_regression_residual" and data.kind != "regression":
        raise ValueError("squared_regression_residual loss requires regression data")
    if loss not in ("squared_euclidean", "squared_regression_residual"):
        raise ValueError(f"unknown loss {loss!r}")

    order = canonical_order(data.canonical_key())
    if data.kind == "vector":
        engine = _VectorEngine(data.matrix[order])
    else:
        engine = _RegressionEngine(data.matrix[order], data.response[order])

    n, d = data.n, data.d
    if k == "auto":
        if not 1 <= k_max <= n:
            raise ValueError("k_max must lie in 1..n")
        best = None
        for kk in range(1, k_max + 1):
            run = _run(engine, kk, max_iter)
            bic = _bic(run.within_loss, n, d, kk)
            if best is None or bic < best[0]:
                best = (bic, run)
        run = best[1]
        bic_value = best[0]
    else:
        k = int(k)
        if k < 1:
            raise ValueError("K must be at least 1")
        if k > n:
            raise ValueError(f"cannot form {k} clusters from {n} observations")
        run = _run(engine, k, max_iter)
        bic_value = None

    labels = np.empty(n, dtype=np.int64)
    labels[order] = run.labels + 1
    return KMeansResult(
        labels=labels,
        centroids=run.centroids,
        K=run.centroids.shape[0],
        bic=bic_value,
        iterations=run.iterations,
        converged=run.converged,
        within_loss=run.within_loss,
    )


def kmeans_label_scores(data: Dataset, **kwargs) -> ScoreSeries:
    """Cluster labels as raw (tied) scores; jitter before ranking."""
    return ScoreSeries(scores=kmeans_scores(data, **kwargs).labels.astype(np.float64))


def _bic(within: float, n: int, d: int, k: int) -> float:
    log_term = -math.inf if within <= 0.0 else math.log(within / n)
    return 0.5 * n * log_term + k * (d + 1) * math.log(n)


@dataclass
class _Run:
    labels: np.ndarray  # 0-based, canonical order
    centroids: np.ndarray
    iterations: int
    converged: bool
    within_loss: float


class _VectorEngine:
    """Squared Euclidean loss over points; centroids are cluster means."""

    def __init__(self, points: np.ndarray):
        self.points = points
        self.n = points.shape[0]

    def init_points(self) -> np.ndarray:
        return self.points

    def cost(self, centroids: np.ndarray) -> np.ndarray:
        diff = self.points[:, None, :] - centroids[None, :, :]
        return (diff**2).sum(axis=2)

    def fit_cluster(self, members: np.ndarray) -> np.ndarray:
        return self.points[members].mean(axis=0)

    def fit_single(self, idx: int) -> np.ndarray:
        return self.points[idx].copy()

    def single_cost(self, centroid: np.ndarray) -> np.ndarray:
        return ((self.points - centroid) ** 2).sum(axis=1)


class _RegressionEngine:
    """Squared residual loss; centroids are per-cluster least-squares fits."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        self.x = x
        self.y = y
        self.n = x.shape[0]

    def init_points(self) -> np.ndarray:
        return self.y[:, None] * self.x

    def cost(self, centroids: np.ndarray) -> np.ndarray:
        return (self.y[:, None] - self.x @ centroids.T) ** 2

    def fit_cluster(self, members: np.ndarray) -> np.ndarray:
        coef, *_ = np.linalg.lstsq(self.x[members], self.y[members], rcond=None)
        return coef

    def fit_single(self, idx: int) -> np.ndarray:
        members = np.zeros(self.n, dtype=bool)
        members[idx] = True
        return self.fit_cluster(members)

    def single_cost(self, centroid: np.ndarray) -> np.ndarray:
        return (self.y - self.x @ centroid) ** 2


def _estimate(engine, labels: np.ndarray, k: int, d: int) -> np.ndarray:
    """Refit all centroids; empty clusters reseed at the currently farthest point."""
    centroids = np.zeros((k, d))
    empty = []
    for j in range(k):
        members = labels == j
        if members.any():
            centroids[j] = engine.fit_cluster(members)
        else:
            empty.append(j)
    if empty:
        assigned = engine.cost(centroids)[np.arange(engine.n), labels]
        for j in empty:
            far = int(assigned.argmax())
            centroids[j] = engine.fit_single(far)
            assigned = np.minimum(assigned, engine.single_cost(centroids[j]))
    return centroids


def _farthest_point_init(points: np.ndarray, k: int) -> np.ndarray:
    """Sample mean first, then repeatedly the point farthest from its nearest centroid.

    Rows are canonically sorted, so argmax's first-index tie-break picks the
    lexicographically smallest tied point.
    """
    centroids = [points.mean(axis=0)]
    for _ in range(1, k):
        chosen = np.stack(centroids)
        dist = ((points[:, None, :] - chosen[None, :, :]) ** 2).sum(axis=2).min(axis=1)
        centroids.append(points[int(dist.argmax())].copy())
    return np.stack(centroids)


def _run(engine, k: int, max_iter: int) -> _Run:
    init_points = engine.init_points()
    prelim = _farthest_point_init(init_points, k)
    # Preliminary membership pass under squared Euclidean loss on the init
    # representation, then one estimation pass under the target loss. For
    # vector data this coincides with a plain first iteration.
    init_cost = ((init_points[:, None, :] - prelim[None, :, :]) ** 2).sum(axis=2)
    labels = init_cost.argmin(axis=1)
    centroids = _estimate(engine, labels, k, _centroid_dim(engine))

    converged = False
    iterations = 0
    within = math.inf
    labels = engine.cost(centroids).argmin(axis=1)
    for iterations in range(1, max_iter + 1):
        centroids = _estimate(engine, labels, k, _centroid_dim(engine))
        cost = engine.cost(centroids)
        new_labels = cost.argmin(axis=1)
        loss = float(cost[np.arange(engine.n), new_labels].sum())
        if math.isfinite(within) and loss > within + 1e-9 * (1.0 + within):
            raise RuntimeError("within-cluster loss increased across an iteration")
        within = loss
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
    return _Run(
        labels=labels,
        centroids=centroids,
        iterations=iterations,
        converged=converged,
        within_loss=within,
    )


def _centroid_dim(engine) -> int:
    if isinstance(engine, _VectorEngine):
        return engine.points.shape[1]
    return engine.x.shape[1]
