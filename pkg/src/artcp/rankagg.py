"""Local ranks and split-point aggregation statistics.

Intervals follow the half-open convention (start, end]: start is exclusive,
end inclusive, both 1-based positions into the score series, so the interval
covers positions start+1 .. end and maps directly onto the Python slice
scores[start:end].

Two aggregations are provided. The rank CUSUM takes the maximum over splits t
of m^{-3/2} |sum_{i<=t} (R_i - (m+1)/2)| of centered local ranks, equal to the
maximal absolute two-sample rank-sum contrast. The nonparametric likelihood
aggregation integrates a two-sample empirical-likelihood ratio against the
interval's own continuity-adjusted ECDF, picking up general distributional
change. Both depend on the scores only through their local ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .transform import ScoreSeries, TieError


class AggregationKind(str, Enum):
    RANK_CUSUM = "rank_cusum"
    NP_LIKELIHOOD = "np_likelihood"


#: Shortest interval each aggregation accepts.
MIN_LENGTH = {AggregationKind.RANK_CUSUM: 2, AggregationKind.NP_LIKELIHOOD: 4}

#: Points required on each side of an admissible nonparametric-likelihood split.
NP_MIN_SEGMENT = 2


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open index interval (start, end] over a length-n series."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid interval ({self.start}, {self.end}]")

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class RankVector:
    """Local ranks of the covered scores: a permutation of 1..length."""

    ranks: np.ndarray
    interval: Interval


@dataclass(frozen=True)
class AggregationOutcome:
    """Split statistic value plus the (absolute) position attaining it."""

    statistic: float
    split: int
    kind: AggregationKind


def _score_array(scores) -> np.ndarray:
    if isinstance(scores, ScoreSeries):
        return scores.scores
    return np.asarray(scores, dtype=np.float64)


def ranks(scores, interval: Interval) -> RankVector:
    """Local ranks R_i = #{j in interval : S_j <= S_i} for covered i."""
    values = _score_array(scores)
    if interval.end > values.shape[0]:
        raise ValueError(f"interval ({interval.start}, {interval.end}] exceeds series length {values.shape[0]}")
    segment = values[interval.start : interval.end]
    if np.unique(segment).size != segment.size:
        raise TieError("tied scores within the interval; apply jitter before ranking")
    local = local_ranks(segment[None, :])[0]
    return RankVector(ranks=local, interval=interval)


def local_ranks(rows: np.ndarray) -> np.ndarray:
    """Ranks 1..m of distinct values along the last axis, vectorized."""
    order = np.argsort(rows, axis=-1, kind="stable")
    out = np.empty_like(order)
    m = rows.shape[-1]
    np.put_along_axis(out, order, np.broadcast_to(np.arange(1, m + 1), rows.shape), axis=-1)
    return out


def rank_cusum_rows(local: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rank-CUSUM statistic and smallest maximizing local split, along the last axis.

    Local splits are 1-based: split t puts the first t covered points left.
    """
    m = local.shape[-1]
    if m < 2:
        raise ValueError("rank CUSUM needs interval length >= 2")
    centered = local - (m + 1) / 2.0
    partial = np.cumsum(centered, axis=-1)[..., : m - 1]
    magnitude = np.abs(partial)
    stats = magnitude.max(axis=-1) * m**-1.5
    splits = magnitude.argmax(axis=-1) + 1
    return stats, splits


def rank_cusum(rank_vector: RankVector) -> AggregationOutcome:
    stats, splits = rank_cusum_rows(np.asarray(rank_vector.ranks)[None, :])
    return AggregationOutcome(
        statistic=float(stats[0]),
        split=rank_vector.interval.start + int(splits[0]),
        kind=AggregationKind.RANK_CUSUM,
    )


def ecdf_adjusted(values, point: float) -> float:
    """Continuity-adjusted ECDF (count(values <= point) + 0.5) / (m + 1).

    Strictly inside (0, 1), so likelihood logarithms stay finite.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("ECDF of an empty sample")
    return (float(np.count_nonzero(arr <= point)) + 0.5) / (arr.size + 1)


def np_likelihood_from_local_ranks(local: np.ndarray) -> tuple[float, int]:
    """Nonparametric-likelihood split statistic from one interval's local ranks.

    Evaluates, at each admissible split t, the sum over the interval's own
    score atoms (each carrying ECDF jump 1/(m+1)) of twice the two-sample
    likelihood ratio weighted by 1 / {F (1 - F)} of the interval ECDF. Splits
    leaving fewer than NP_MIN_SEGMENT points on a side are skipped. Returns
    the maximum and the smallest maximizing local t.
    """
    local = np.asarray(local)
    m = local.shape[0]
    if m < 2 * NP_MIN_SEGMENT:
        raise ValueError(f"nonparametric likelihood needs interval length >= {2 * NP_MIN_SEGMENT}")
    grid = np.arange(1, m + 1, dtype=np.float64)
    pooled = (grid + 0.5) / (m + 1)
    weight = 2.0 / ((m + 1) * pooled * (1.0 - pooled))
    log_pooled = np.log(pooled)
    log_pooled_c = np.log1p(-pooled)

    left_counts = np.zeros(m)
    best = -np.inf
    best_t = 0
    for t in range(1, m):
        left_counts[local[t - 1] - 1 :] += 1.0
        if t < NP_MIN_SEGMENT or m - t < NP_MIN_SEGMENT:
            continue
        f1 = (left_counts + 0.5) / (t + 1)
        f2 = (grid - left_counts + 0.5) / (m - t + 1)
        lam = t * (f1 * (np.log(f1) - log_pooled) + (1.0 - f1) * (np.log1p(-f1) - log_pooled_c))
        lam += (m - t) * (f2 * (np.log(f2) - log_pooled) + (1.0 - f2) * (np.log1p(-f2) - log_pooled_c))
        value = float(lam @ weight)
        if value > best:
            best = value
            best_t = t
    return best, best_t


def np_likelihood(scores, interval: Interval) -> AggregationOutcome:
    rank_vector = ranks(scores, interval)
    stat, t = np_likelihood_from_local_ranks(rank_vector.ranks)
    return AggregationOutcome(
        statistic=stat, split=interval.start + t, kind=AggregationKind.NP_LIKELIHOOD
    )


def aggregate(scores, interval: Interval, kind: AggregationKind) -> AggregationOutcome:
    """Dispatch to the requested aggregation over the interval's local ranks."""
    kind = AggregationKind(kind)
    if kind is AggregationKind.RANK_CUSUM:
        return rank_cusum(ranks(scores, interval))
    return np_likelihood(scores, interval)


def scp_argmax(scores, interval: Interval, kind: AggregationKind = AggregationKind.RANK_CUSUM) -> int:
    """Estimated changepoint inside the interval: the maximizing split position."""
    return aggregate(scores, interval, kind).split
