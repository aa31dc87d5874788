"""Synthetic changepoint designs: mean shifts, regression shifts, distribution shifts.

Sampling is fixed to Box-Muller normals (and the normal/chi-square ratio for
t(3)) over counter-based streams, so a (design, seed) pair regenerates the
exact same dataset on any platform. Error laws:

  normal     c_P * N(0, 1)
  t3         t(3) / c_P
  lognormal  c_P * exp(N(0, 1) / 10)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rng
from .transform import Dataset

ERROR_LAWS = ("normal", "t3", "lognormal")
DIST_PATTERNS = ("covariance", "full", "partial")


@dataclass(frozen=True)
class ChangeDesign:
    """Parameters of one synthetic scenario."""

    model: str
    n: int
    d: int
    tau_star: tuple[int, ...] = ()
    s: int = 1
    c_theta: float = 1.0
    c_p: float = 1.0
    error_law: str = "normal"
    pattern: str = "covariance"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.model not in ("mean", "regression", "distribution"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.n < 2 or self.d < 1:
            raise ValueError("need n >= 2 and d >= 1")
        taus = tuple(int(t) for t in self.tau_star)
        if any(not 0 < t < self.n for t in taus) or list(taus) != sorted(set(taus)):
            raise ValueError("changepoints must be strictly increasing inside (0, n)")
        object.__setattr__(self, "tau_star", taus)
        if not 0 <= self.s <= self.d:
            raise ValueError("sparsity s must lie in 0..d")
        if self.c_p <= 0:
            raise ValueError("c_p must be positive")
        if self.error_law not in ERROR_LAWS:
            raise ValueError(f"error_law must be one of {ERROR_LAWS}")
        if self.model == "distribution" and self.pattern not in DIST_PATTERNS:
            raise ValueError(f"pattern must be one of {DIST_PATTERNS}")
        if self.model == "regression" and self.d < 3:
            raise ValueError("regression designs need d >= 3")

    @property
    def k_star(self) -> int:
        return len(self.tau_star)

    def segment_bounds(self) -> list[tuple[int, int]]:
        edges = (0, *self.tau_star, self.n)
        return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


@dataclass(frozen=True)
class SimResult:
    dataset: Dataset
    design: ChangeDesign
    thetas: np.ndarray | None = None
    segment_laws: tuple[str, ...] | None = None


def _error_draw(rng, law: str, c_p: float, shape) -> np.ndarray:
    if law == "normal":
        return c_p * _rng.standard_normal(rng, shape)
    if law == "t3":
        return _rng.student_t3(rng, shape) / c_p
    return c_p * np.exp(_rng.standard_normal(rng, shape) / 10.0)


def _sparse_increment(rng, d: int, s: int, c_theta: float) -> np.ndarray:
    """A vector with exactly s nonzero entries, each +-c_theta, support redrawn."""
    increment = np.zeros(d)
    support = rng.permutation(d)[:s]
    signs = np.where(rng.random(s) < 0.5, -c_theta, c_theta)
    increment[support] = signs
    return increment


def _theta_path(design: ChangeDesign, theta_first: np.ndarray) -> np.ndarray:
    rng = _rng.stream(design.seed, _rng.TAG_SUPPORT)
    thetas = np.empty((design.k_star + 1, design.d))
    thetas[0] = theta_first
    for k in range(design.k_star):
        increment = _sparse_increment(rng, design.d, design.s, design.c_theta)
        assert np.count_nonzero(increment) == design.s
        assert np.all(np.abs(increment[increment != 0.0]) == design.c_theta)
        thetas[k + 1] = thetas[k] + increment
    return thetas


def _ar1_rows(rng, n: int, d: int, rho: float) -> np.ndarray:
    """Rows from N(0, Sigma) with Sigma_ij = rho^|i-j|, via the recursive factor."""
    innovations = _rng.standard_normal(rng, (n, d))
    out = np.empty((n, d))
    out[:, 0] = innovations[:, 0]
    scale = np.sqrt(1.0 - rho * rho)
    for j in range(1, d):
        out[:, j] = rho * out[:, j - 1] + scale * innovations[:, j]
    return out


def gen_mean_change(design: ChangeDesign) -> SimResult:
    """Piecewise-constant mean vectors with sparse +-c_theta increments."""
    if design.model != "mean":
        raise ValueError("design model must be 'mean'")
    thetas = _theta_path(design, np.zeros(design.d))
    noise = _error_draw(
        _rng.stream(design.seed, _rng.TAG_NOISE), design.error_law, design.c_p, (design.n, design.d)
    )
    data = noise
    for k, (lo, hi) in enumerate(design.segment_bounds()):
        data[lo:hi] += thetas[k]
    return SimResult(dataset=Dataset(kind="vector", matrix=data), design=design, thetas=thetas)


def gen_regression_change(design: ChangeDesign) -> SimResult:
    """Piecewise-constant regression coefficients over AR(1)-correlated covariates."""
    if design.model != "regression":
        raise ValueError("design model must be 'regression'")
    theta_first = np.zeros(design.d)
    theta_first[0] = 0.5
    theta_first[2] = 0.5
    thetas = _theta_path(design, theta_first)
    x = _ar1_rows(_rng.stream(design.seed, _rng.TAG_COVARIATE), design.n, design.d, 0.3)
    noise = _error_draw(
        _rng.stream(design.seed, _rng.TAG_NOISE), design.error_law, design.c_p, design.n
    )
    y = noise
    for k, (lo, hi) in enumerate(design.segment_bounds()):
        y[lo:hi] += x[lo:hi] @ thetas[k]
    return SimResult(
        dataset=Dataset(kind="regression", matrix=x, response=y), design=design, thetas=thetas
    )


def gen_dist_change(design: ChangeDesign) -> SimResult:
    """Alternating segment laws: covariance, full, or partial distributional change."""
    if design.model != "distribution":
        raise ValueError("design model must be 'distribution'")
    rng = _rng.stream(design.seed, _rng.TAG_NOISE)
    data = np.empty((design.n, design.d))
    laws = []
    for k, (lo, hi) in enumerate(design.segment_bounds()):
        rows = hi - lo
        odd = k % 2 == 0  # segments 1, 3, ... in 1-based numbering
        if design.pattern == "covariance":
            if odd:
                data[lo:hi] = np.sqrt(design.c_p) * _rng.standard_normal(rng, (rows, design.d))
                laws.append("normal_iso")
            else:
                data[lo:hi] = _ar1_rows(rng, rows, design.d, 0.9)
                laws.append("normal_ar1")
        elif design.pattern == "full":
            if odd:
                data[lo:hi] = _rng.standard_normal(rng, (rows, design.d))
                laws.append("normal_iso")
            else:
                data[lo:hi] = _rng.student_t3(rng, (rows, design.d))
                laws.append("t3_all")
        else:
            if odd:
                data[lo:hi] = _rng.standard_normal(rng, (rows, design.d))
                laws.append("normal_iso")
            else:
                touched = int(0.4 * design.d)
                data[lo:hi] = _rng.standard_normal(rng, (rows, design.d))
                data[lo:hi, :touched] = _rng.student_t3(rng, (rows, touched))
                laws.append(f"t3_first_{touched}")
    return SimResult(
        dataset=Dataset(kind="vector", matrix=data), design=design, segment_laws=tuple(laws)
    )


def generate(design: ChangeDesign) -> SimResult:
    if design.model == "mean":
        return gen_mean_change(design)
    if design.model == "regression":
        return gen_regression_change(design)
    return gen_dist_change(design)
