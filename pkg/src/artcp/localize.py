"""Narrowest-over-threshold localization with global false-positive control.

All interval statistics are computed once, up front, on the full series; the
recursion only consults this fixed vector and never re-aggregates on sub-data.
Each step selects the narrowest contained interval whose statistic exceeds the
permutation threshold, estimates a changepoint inside it, and recurses on the
two flanks, so selected regions cover pairwise disjoint index sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multiscale import (
    IntervalSet,
    PermutationPlan,
    ThresholdResult,
    multiscale_stats,
    threshold,
)
from .rankagg import AggregationKind, Interval, aggregate
from .transform import ScoreSeries


@dataclass(frozen=True)
class LocalizationResult:
    """Localized regions, one estimated changepoint per region, and the threshold."""

    regions: tuple[Interval, ...]
    changepoints: tuple[int, ...]
    region_statistics: tuple[float, ...]
    threshold: ThresholdResult
    alpha: float
    B: int
    seed: int
    degenerate: bool = False

    def __post_init__(self) -> None:
        if not (len(self.regions) == len(self.changepoints) == len(self.region_statistics)):
            raise ValueError("regions, changepoints, and statistics must align")
        previous_end = None
        for region, tau in zip(self.regions, self.changepoints):
            if not region.start < tau < region.end:
                raise ValueError(f"changepoint {tau} not strictly inside ({region.start}, {region.end}]")
            if previous_end is not None and region.start < previous_end:
                raise ValueError("regions must be sorted with disjoint interiors")
            previous_end = region.end


def containment_subset(intervals: IntervalSet, lo: int, hi: int) -> list[int]:
    """Indices of intervals contained in [lo, hi]: lo <= start and end <= hi."""
    if not 0 <= lo <= hi <= intervals.n:
        raise ValueError(f"containment bounds [{lo}, {hi}] outside 0..{intervals.n}")
    return [ell for ell, iv in enumerate(intervals) if lo <= iv.start and iv.end <= hi]


def narrowest_search(
    intervals: IntervalSet, stats: np.ndarray, critical: float
) -> list[int]:
    """Indices selected by the narrowest-over-threshold recursion, in visit order.

    Ties on width break to the leftmost start, then the lowest index. The
    flanks [s, start] and [end, e] of a selection are searched next,
    left flank first.
    """
    stats = np.asarray(stats, dtype=np.float64)
    if stats.shape != (len(intervals),):
        raise ValueError("need one statistic per interval")
    selected: list[int] = []
    stack: list[tuple[int, int]] = [(0, intervals.n)]
    while stack:
        s, e = stack.pop()
        if e - s <= 1:
            continue
        exceeding = [
            ell for ell in containment_subset(intervals, s, e) if stats[ell] > critical
        ]
        if not exceeding:
            continue
        chosen = min(
            exceeding, key=lambda ell: (intervals[ell].length, intervals[ell].start, ell)
        )
        selected.append(chosen)
        region = intervals[chosen]
        stack.append((region.end, e))
        stack.append((s, region.start))
    return selected


def localize(
    scores: ScoreSeries,
    intervals: IntervalSet,
    kind: AggregationKind,
    alpha: float,
    plan: PermutationPlan,
    *,
    scp_kind: AggregationKind = AggregationKind.RANK_CUSUM,
    threads: int = 1,
) -> LocalizationResult:
    """Localized regions and changepoint estimates at joint level alpha."""
    stats = multiscale_stats(scores, intervals, kind)
    crit = threshold(intervals, kind, alpha, plan, threads)
    if crit.degenerate:
        return LocalizationResult(
            regions=(),
            changepoints=(),
            region_statistics=(),
            threshold=crit,
            alpha=alpha,
            B=plan.B,
            seed=plan.master_seed,
            degenerate=True,
        )
    picked = narrowest_search(intervals, stats, crit.t_alpha_B)
    picked.sort(key=lambda ell: (intervals[ell].start, intervals[ell].end))
    regions = tuple(intervals[ell] for ell in picked)
    changepoints = tuple(aggregate(scores, region, scp_kind).split for region in regions)
    return LocalizationResult(
        regions=regions,
        changepoints=changepoints,
        region_statistics=tuple(float(stats[ell]) for ell in picked),
        threshold=crit,
        alpha=alpha,
        B=plan.B,
        seed=plan.master_seed,
    )
