"""Interval families, joint local-rank statistics, and the permutation engine.

Families are constructed from (n, parameters) alone, never from the scores;
this data-independence is what makes the joint statistics exactly calibratable
by permutation. The engine evaluates the statistic vector of any global rank
sequence, so permutation replicates and the observed scores flow through the
same code path. Replicate b draws from a stream keyed by (master_seed, b),
which makes results identical for any worker count or evaluation order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _rng
from .rankagg import (
    MIN_LENGTH,
    AggregationKind,
    Interval,
    local_ranks,
    np_likelihood_from_local_ranks,
    rank_cusum_rows,
    ranks,
)
from .transform import ScoreSeries, TieError

DEFAULT_B = 200
DEFAULT_SEEDED_DECAY = 2.0**-0.5


@dataclass(frozen=True)
class IntervalSet:
    """Ordered, data-independent family of intervals within (0, n]."""

    intervals: tuple[Interval, ...]
    n: int
    strategy: str

    def __post_init__(self) -> None:
        if not self.intervals:
            raise ValueError("interval set must be non-empty")
        for iv in self.intervals:
            if iv.end > self.n:
                raise ValueError(f"interval ({iv.start}, {iv.end}] exceeds n = {self.n}")

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, idx: int) -> Interval:
        return self.intervals[idx]


def _check_window(n: int, h: int) -> None:
    if not (1 <= h and 2 * h <= n):
        raise ValueError(f"window half-width h = {h} must satisfy 1 <= h <= n/2 (n = {n})")


def gen_moving_windows(n: int, h: int) -> IntervalSet:
    """Non-overlapping-start windows (lh - h, lh + h] for l = 1 .. floor((n-h)/h)."""
    _check_window(n, h)
    count = (n - h) // h
    intervals = tuple(Interval(ell * h - h, ell * h + h) for ell in range(1, count + 1))
    return IntervalSet(intervals=intervals, n=n, strategy=f"moving_window(h={h})")


def gen_sliding_windows(n: int, h: int) -> IntervalSet:
    """All centered windows (l - h, l + h] for l = h .. n - h."""
    _check_window(n, h)
    intervals = tuple(Interval(ell - h, ell + h) for ell in range(h, n - h + 1))
    return IntervalSet(intervals=intervals, n=n, strategy=f"sliding_window(h={h})")


def _robust_ceil(x: float) -> int:
    """Ceiling that forgives float noise around exact integers."""
    nearest = round(x)
    if abs(x - nearest) < 1e-9:
        return int(nearest)
    return math.ceil(x)


def gen_seeded_intervals(n: int, decay: float = DEFAULT_SEEDED_DECAY) -> IntervalSet:
    """Deterministic multi-resolution family with roughly 50% within-layer overlap.

    Layer k holds intervals of length ceil(n * decay^(k-1)), stepped by half
    their length plus one flushed to the right edge, until lengths drop
    below 4. Duplicates across layers are removed, first occurrence kept.
    """
    if n < 4:
        raise ValueError("seeded intervals need n >= 4")
    if not 0.5 < decay < 1.0:
        raise ValueError("decay must lie strictly between 1/2 and 1")
    intervals: list[Interval] = []
    seen: set[tuple[int, int]] = set()
    k = 1
    while True:
        length = _robust_ceil(n * decay ** (k - 1))
        if length < 4:
            break
        step = max(1, length // 2)
        starts = sorted(set(range(0, n - length + 1, step)) | {n - length})
        for s in starts:
            key = (s, s + length)
            if key not in seen:
                seen.add(key)
                intervals.append(Interval(s, s + length))
        k += 1
    return IntervalSet(intervals=tuple(intervals), n=n, strategy=f"seeded(decay={decay:g})")


def gen_all_subintervals(n: int, min_len: int) -> IntervalSet:
    """Every (s, e] with e - s >= min_len, ordered by length then start."""
    if not 2 <= min_len <= n:
        raise ValueError(f"min_len = {min_len} must lie in 2..n (n = {n})")
    intervals = tuple(
        Interval(s, s + m) for m in range(min_len, n + 1) for s in range(0, n - m + 1)
    )
    return IntervalSet(intervals=intervals, n=n, strategy=f"all_subintervals(min_len={min_len})")


def explicit_intervals(n: int, pairs) -> IntervalSet:
    """Wrap caller-supplied (start, end] pairs as an interval family."""
    intervals = tuple(Interval(int(s), int(e)) for s, e in pairs)
    return IntervalSet(intervals=intervals, n=n, strategy="explicit")


def full_interval(n: int) -> IntervalSet:
    return IntervalSet(intervals=(Interval(0, n),), n=n, strategy="full")


@dataclass(frozen=True)
class PermutationPlan:
    """Addressable permutation randomness: replicate b never depends on order."""

    B: int = DEFAULT_B
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError("B must be at least 1")

    def permutation(self, b: int, n: int) -> np.ndarray:
        """Uniform permutation of 1..n for replicate b (Fisher-Yates on Philox)."""
        if not 0 <= b < self.B:
            raise ValueError(f"replicate index {b} outside 0..{self.B - 1}")
        rng = _rng.stream(self.master_seed, _rng.TAG_PERMUTATION, b)
        return rng.permutation(n) + 1

    def tiebreak_uniform(self) -> float:
        """The U(0,1) tie-break draw, from its own dedicated stream."""
        return float(_rng.stream(self.master_seed, _rng.TAG_TIEBREAK_U).random())


@dataclass(frozen=True)
class ThresholdResult:
    """Calibrated critical value: an order statistic of replicate maxima."""

    t_alpha_B: float
    alpha: float
    B: int
    max_stats: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class PValue:
    value: float
    B: int
    randomized_u: float


def _validate_lengths(intervals: IntervalSet, kind: AggregationKind) -> None:
    minimum = MIN_LENGTH[AggregationKind(kind)]
    for iv in intervals:
        if iv.length < minimum:
            raise ValueError(
                f"interval ({iv.start}, {iv.end}] shorter than {minimum}, "
                f"the minimum for {AggregationKind(kind).value}"
            )


def stats_from_rank_rows(
    rank_rows: np.ndarray, intervals: IntervalSet, kind: AggregationKind
) -> np.ndarray:
    """Statistic matrix (rows, L): one aggregation per interval per rank row.

    Rank-CUSUM intervals are processed grouped by length so each group is one
    vectorized pass; per-row arithmetic is identical to the per-interval path.
    """
    kind = AggregationKind(kind)
    _validate_lengths(intervals, kind)
    rank_rows = np.atleast_2d(rank_rows)
    out = np.empty((rank_rows.shape[0], len(intervals)))
    if kind is AggregationKind.RANK_CUSUM:
        by_length: dict[int, list[int]] = {}
        for ell, iv in enumerate(intervals):
            by_length.setdefault(iv.length, []).append(ell)
        for m, members in by_length.items():
            starts = np.array([intervals[ell].start for ell in members])
            gather = starts[:, None] + np.arange(m)[None, :]
            local = local_ranks(rank_rows[:, gather])  # (rows, group, m)
            out[:, members] = rank_cusum_rows(local)[0]
    else:
        for ell, iv in enumerate(intervals):
            local = local_ranks(rank_rows[:, iv.start : iv.end])
            for row in range(local.shape[0]):
                out[row, ell] = np_likelihood_from_local_ranks(local[row])[0]
    return out


def global_ranks(scores: ScoreSeries) -> np.ndarray:
    """Ranks of all n scores; raises TieError on duplicates."""
    if scores.has_ties():
        raise TieError("tied scores; apply jitter before rank aggregation")
    return ranks(scores, Interval(0, scores.n)).ranks


def multiscale_stats(
    scores: ScoreSeries, intervals: IntervalSet, kind: AggregationKind
) -> np.ndarray:
    """The joint statistic vector (T_1, ..., T_L) over the family."""
    return stats_from_rank_rows(global_ranks(scores)[None, :], intervals, kind)[0]


def g_of_permutation(pi, intervals: IntervalSet, kind: AggregationKind) -> np.ndarray:
    """Statistic vector of a permutation treated as the global rank sequence."""
    pi = np.asarray(pi, dtype=np.int64)
    n = intervals.n
    if pi.shape != (n,) or not np.array_equal(np.sort(pi), np.arange(1, n + 1)):
        raise ValueError(f"expected a permutation of 1..{n}")
    return stats_from_rank_rows(pi[None, :], intervals, kind)[0]


def replicate_max_stats(
    intervals: IntervalSet,
    kind: AggregationKind,
    plan: PermutationPlan,
    threads: int = 1,
) -> np.ndarray:
    """max_l statistic of each permutation replicate, in replicate order."""
    n = intervals.n
    out = np.empty(plan.B)

    def fill(lo: int, hi: int) -> None:
        rows = np.empty((hi - lo, n), dtype=np.int64)
        for b in range(lo, hi):
            rows[b - lo] = plan.permutation(b, n)
        out[lo:hi] = stats_from_rank_rows(rows, intervals, kind).max(axis=1)

    threads = max(1, int(threads))
    if threads == 1:
        fill(0, plan.B)
    else:
        chunk = (plan.B + threads - 1) // threads
        bounds = [(lo, min(lo + chunk, plan.B)) for lo in range(0, plan.B, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda span: fill(*span), bounds))
    return out


def order_statistic_index(alpha: float, B: int) -> int:
    """ceil((1 - alpha)(B + 1)) computed robustly against float noise."""
    x = alpha * (B + 1)
    nearest = round(x)
    if abs(x - nearest) < 1e-9:
        x = nearest
    return (B + 1) - math.floor(x)


def threshold(
    intervals: IntervalSet,
    kind: AggregationKind,
    alpha: float,
    plan: PermutationPlan,
    threads: int = 1,
) -> ThresholdResult:
    """The ceil((1-alpha)(B+1))-th smallest replicate maximum.

    When that index exceeds B (alpha too small for the replicate budget) the
    threshold is +inf and the result is flagged degenerate, so downstream
    error control degrades conservatively.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    maxima = np.sort(replicate_max_stats(intervals, kind, plan, threads))
    idx = order_statistic_index(alpha, plan.B)
    if idx > plan.B:
        return ThresholdResult(
            t_alpha_B=math.inf, alpha=alpha, B=plan.B, max_stats=maxima, degenerate=True
        )
    return ThresholdResult(
        t_alpha_B=float(maxima[idx - 1]), alpha=alpha, B=plan.B, max_stats=maxima
    )


def p_value_multi(
    scores: ScoreSeries,
    intervals: IntervalSet,
    kind: AggregationKind,
    plan: PermutationPlan,
    threads: int = 1,
) -> PValue:
    """Randomized permutation p-value of the maximal interval statistic."""
    observed = float(multiscale_stats(scores, intervals, kind).max())
    maxima = replicate_max_stats(intervals, kind, plan, threads)
    greater = int(np.count_nonzero(maxima > observed))
    equal = int(np.count_nonzero(maxima == observed))
    u = plan.tiebreak_uniform()
    value = (greater + u * (1 + equal)) / (plan.B + 1)
    return PValue(value=float(value), B=plan.B, randomized_u=u)


def p_value_single(
    scores: ScoreSeries,
    kind: AggregationKind,
    plan: PermutationPlan,
    threads: int = 1,
) -> PValue:
    """Global-interval special case of the multi-interval p-value."""
    return p_value_multi(scores, full_interval(scores.n), kind, plan, threads)
