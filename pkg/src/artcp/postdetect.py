"""Post-detection validation of externally supplied changepoint candidates.

Each candidate tau is scored on its window (tau - h, tau + h] and retained
only when the statistic exceeds the permutation threshold calibrated over the
*full* sliding-window family, not just the candidate windows; thresholding
candidate windows alone would be anti-conservative.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multiscale import (
    PermutationPlan,
    ThresholdResult,
    gen_sliding_windows,
    threshold,
)
from .rankagg import AggregationKind, Interval, aggregate
from .transform import ScoreSeries


@dataclass(frozen=True)
class CandidateSet:
    """Deduplicated, sorted candidate positions with their test window."""

    candidates: tuple[int, ...]
    h: int

    def __post_init__(self) -> None:
        if self.h < 1:
            raise ValueError("window half-width h must be at least 1")
        cleaned = tuple(sorted(set(int(c) for c in self.candidates)))
        object.__setattr__(self, "candidates", cleaned)


@dataclass(frozen=True)
class ValidationReport:
    candidates: tuple[int, ...]
    statistics: tuple[float, ...]
    retained: tuple[int, ...]
    dropped: tuple[int, ...]
    threshold: ThresholdResult


def tune_filter(
    scores: ScoreSeries,
    candidates: CandidateSet,
    kind: AggregationKind,
    alpha: float,
    plan: PermutationPlan,
    threads: int = 1,
) -> ValidationReport:
    """Retain candidates whose windowed statistic exceeds the family threshold."""
    n = scores.n
    h = candidates.h
    for tau in candidates.candidates:
        if not h <= tau <= n - h:
            raise ValueError(
                f"candidate {tau} outside the admissible range [{h}, {n - h}] for h = {h}"
            )
    family = gen_sliding_windows(n, h)
    crit = threshold(family, kind, alpha, plan, threads)
    stats = tuple(
        aggregate(scores, Interval(tau - h, tau + h), kind).statistic
        for tau in candidates.candidates
    )
    retained = tuple(
        tau for tau, stat in zip(candidates.candidates, stats) if stat > crit.t_alpha_B
    )
    dropped = tuple(tau for tau in candidates.candidates if tau not in retained)
    return ValidationReport(
        candidates=candidates.candidates,
        statistics=stats,
        retained=retained,
        dropped=dropped,
        threshold=crit,
    )
