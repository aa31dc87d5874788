import numpy as np
import pytest

from artcp import (
    AggregationKind,
    CandidateSet,
    PermutationPlan,
    ScoreSeries,
    jitter,
    tune_filter,
)

RC = AggregationKind.RANK_CUSUM


def test_candidate_set_sorts_and_dedupes():
    cs = CandidateSet(candidates=(90, 30, 90, 60), h=10)
    assert cs.candidates == (30, 60, 90)


def test_empty_candidate_list_still_reports_threshold():
    rng = np.random.default_rng(0)
    scores = ScoreSeries(rng.normal(size=60))
    report = tune_filter(scores, CandidateSet((), h=10), RC, 0.1, PermutationPlan(B=50, master_seed=1))
    assert report.retained == ()
    assert report.candidates == ()
    assert np.isfinite(report.threshold.t_alpha_B)


def test_out_of_bounds_candidate_rejected():
    rng = np.random.default_rng(1)
    scores = ScoreSeries(rng.normal(size=60))
    with pytest.raises(ValueError, match=r"candidate 5 outside the admissible range \[10, 50\]"):
        tune_filter(scores, CandidateSet((5,), h=10), RC, 0.1, PermutationPlan(B=50, master_seed=1))


def test_step_signal_power_and_spurious_drop():
    kept_true, dropped_false = 0, 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        values = rng.normal(size=200)
        values[100:] += 10.0  # ten-sigma jump at 100
        scores = ScoreSeries(values)
        report = tune_filter(
            scores, CandidateSet((100, 30), h=30), RC, 0.1, PermutationPlan(B=200, master_seed=seed)
        )
        if 100 in report.retained:
            kept_true += 1
        if 30 in report.dropped:
            dropped_false += 1
    assert kept_true >= 95
    assert dropped_false >= 95


def test_retention_monotone_in_alpha():
    base = ScoreSeries(np.concatenate([np.zeros(50), np.full(50, 2.0)]))
    scores = jitter(base, 1e-6, seed=5)
    plan = PermutationPlan(B=99, master_seed=5)
    strict = tune_filter(scores, CandidateSet((50, 25), h=20), RC, 0.02, plan)
    loose = tune_filter(scores, CandidateSet((50, 25), h=20), RC, 0.3, plan)
    assert set(strict.retained) <= set(loose.retained)


def test_rank_only_dependence_bit_exact():
    rng = np.random.default_rng(7)
    values = rng.normal(size=120)
    plan = PermutationPlan(B=99, master_seed=9)
    candidates = CandidateSet((40, 80), h=20)
    a = tune_filter(ScoreSeries(values), candidates, RC, 0.1, plan)
    b = tune_filter(ScoreSeries(values**3 + values), candidates, RC, 0.1, plan)
    assert a.statistics == b.statistics
    assert a.retained == b.retained
    assert a.threshold.t_alpha_B == b.threshold.t_alpha_B
