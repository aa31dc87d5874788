"""Order-symmetric transformations from raw observations to real-valued scores.

A transformation is *symmetric* when its output for each observation does not
depend on the order of the full sample. All fitted quantities here (sample
means, regression fits, cluster assignments) are computed over a canonical
lexicographic row ordering, so permuting the input rows and un-permuting the
output reproduces the original scores bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rng


class TieError(ValueError):
    """Tied scores where distinct ones are required; apply jitter first."""


def canonical_order(matrix: np.ndarray) -> np.ndarray:
    """Indices sorting rows lexicographically (first column is primary key)."""
    return np.lexsort(tuple(matrix.T[::-1]))


@dataclass(frozen=True)
class Dataset:
    """An independent observation sequence.

    ``vector`` data is an (n, d) real matrix. ``regression`` data pairs a
    length-n response with an (n, d) design matrix.
    """

    kind: str
    matrix: np.ndarray
    response: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("vector", "regression"):
            raise ValueError(f"unknown dataset kind {self.kind!r}")
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("matrix must be 2-dimensional (n rows, d columns)")
        if matrix.shape[0] < 2:
            raise ValueError("need at least 2 observations")
        if matrix.shape[1] < 1:
            raise ValueError("need at least 1 column")
        if not np.isfinite(matrix).all():
            raise ValueError("matrix contains non-finite entries")
        object.__setattr__(self, "matrix", matrix)
        if self.kind == "regression":
            if self.response is None:
                raise ValueError("regression data requires a response vector")
            response = np.asarray(self.response, dtype=np.float64)
            if response.ndim != 1 or response.shape[0] != matrix.shape[0]:
                raise ValueError("response length must equal the design row count")
            if not np.isfinite(response).all():
                raise ValueError("response contains non-finite entries")
            object.__setattr__(self, "response", response)
        elif self.response is not None:
            raise ValueError("vector data takes no response")

    @classmethod
    def vector(cls, values) -> "Dataset":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return cls(kind="vector", matrix=arr)

    @classmethod
    def regression(cls, y, x) -> "Dataset":
        return cls(kind="regression", matrix=np.asarray(x, dtype=np.float64), response=y)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]

    def canonical_key(self) -> np.ndarray:
        """Row matrix whose lexicographic order defines the canonical order."""
        if self.kind == "regression":
            return np.column_stack([self.response, self.matrix])
        return self.matrix


@dataclass(frozen=True)
class ScoreSeries:
    """Real scores derived from observations, with jitter provenance."""

    scores: np.ndarray
    jitter_applied: bool = False
    jitter_epsilon: float = 0.0
    jitter_seed: int | None = None

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1:
            raise ValueError("scores must be 1-dimensional")
        if scores.shape[0] < 2:
            raise ValueError("need at least 2 scores")
        if not np.isfinite(scores).all():
            raise ValueError("scores contain non-finite values")
        object.__setattr__(self, "scores", scores)
        if self.jitter_applied:
            if self.jitter_seed is None:
                raise ValueError("jittered scores must record their seed")
            if np.unique(scores).size != scores.size:
                raise ValueError("jittered scores must be pairwise distinct")
        elif self.jitter_seed is not None:
            raise ValueError("jitter seed recorded without jitter")

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    def has_ties(self) -> bool:
        return np.unique(self.scores).size != self.scores.size


def identity_scores(data: Dataset) -> ScoreSeries:
    """Scores equal to the raw univariate observations."""
    if data.kind != "vector" or data.d != 1:
        raise ValueError("identity scores require univariate vector data (d = 1)")
    return ScoreSeries(scores=data.matrix[:, 0].copy())


def gaussian_deviance_scores(data: Dataset, theta: np.ndarray | None = None) -> ScoreSeries:
    """Negated standard d-variate normal density at each centered observation.

    ``theta`` defaults to the column-wise sample mean, which is symmetric in
    the row order.
    """
    if data.kind != "vector":
        raise ValueError("gaussian deviance scores require vector data")
    if theta is None:
        theta = data.matrix[canonical_order(data.matrix)].mean(axis=0)
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (data.d,):
        raise ValueError(f"theta must have length {data.d}, got shape {theta.shape}")
    centered = data.matrix - theta
    log_density = -0.5 * data.d * math.log(2.0 * math.pi) - 0.5 * (centered**2).sum(axis=1)
    return ScoreSeries(scores=-np.exp(log_density))


def residual_scores(data: Dataset, theta: np.ndarray) -> ScoreSeries:
    """Squared regression residuals (y_i - x_i' theta)^2."""
    if data.kind != "regression":
        raise ValueError("residual scores require regression data")
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (data.d,):
        raise ValueError(f"theta must have length {data.d}, got shape {theta.shape}")
    resid = data.response - data.matrix @ theta
    return ScoreSeries(scores=resid**2)


def jitter(scores: ScoreSeries, epsilon: float, seed: int) -> ScoreSeries:
    """Break ties by adding epsilon-scaled truncated normal noise.

    The noise stream is keyed by ``seed`` alone, so reruns reproduce the exact
    output. Draws are truncated to |e| <= 6, hence any pair of scores more
    than 12 * epsilon apart keeps its ordering.
    """
    if epsilon <= 0:
        raise ValueError("jitter epsilon must be positive")
    rng = _rng.stream(seed, _rng.TAG_JITTER)
    noise = _rng.truncated_standard_normal(rng, scores.n)
    return ScoreSeries(
        scores=scores.scores + epsilon * noise,
        jitter_applied=True,
        jitter_epsilon=float(epsilon),
        jitter_seed=int(seed),
    )


@dataclass(frozen=True)
class ScreenResult:
    """Column-screened dataset plus the selection that produced it."""

    data: Dataset
    selected: tuple[int, ...]
    used_fallback: bool = False


def _screening_magnitudes(data: Dataset) -> np.ndarray:
    # Vector data: |column sample means|. Regression data: |mean of y_i * x_i|,
    # both computed in canonical row order for exact permutation invariance.
    key = data.canonical_key()
    order = canonical_order(key)
    if data.kind == "vector":
        return np.abs(data.matrix[order].mean(axis=0))
    prod = data.response[:, None] * data.matrix
    return np.abs(prod[order].mean(axis=0))


def _take_columns(data: Dataset, cols: np.ndarray) -> Dataset:
    matrix = data.matrix[:, cols]
    if data.kind == "regression":
        return Dataset(kind="regression", matrix=matrix, response=data.response)
    return Dataset(kind="vector", matrix=matrix)


def screen_features(
    data: Dataset,
    rule: str,
    *,
    fraction: float = 0.1,
    fit=None,
) -> ScreenResult:
    """Keep informative columns: the top fraction by magnitude, or the lasso support.

    Ties at the cut boundary are retained inclusively. If the lasso support is
    empty the rule falls back to ``top_fraction(0.1)`` and flags it.
    """
    if rule == "top_fraction":
        if not 0.0 < fraction <= 1.0:
            raise ValueError("fraction must lie in (0, 1]")
        magnitudes = _screening_magnitudes(data)
        k = max(1, math.ceil(fraction * data.d))
        cutoff = np.sort(magnitudes)[::-1][k - 1]
        cols = np.flatnonzero(magnitudes >= cutoff)
        return ScreenResult(data=_take_columns(data, cols), selected=tuple(int(c) for c in cols))
    if rule == "nonzero_lasso":
        if fit is None:
            raise ValueError("nonzero_lasso screening requires a LassoFit")
        coef = np.asarray(fit.coefficients, dtype=np.float64)
        if coef.shape != (data.d,):
            raise ValueError("lasso fit dimension does not match the data")
        cols = np.flatnonzero(coef != 0.0)
        if cols.size == 0:
            fallback = screen_features(data, "top_fraction", fraction=0.1)
            return ScreenResult(
                data=fallback.data, selected=fallback.selected, used_fallback=True
            )
        return ScreenResult(data=_take_columns(data, cols), selected=tuple(int(c) for c in cols))
    raise ValueError(f"unknown screening rule {rule!r}")
