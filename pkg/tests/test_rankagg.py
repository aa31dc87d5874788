import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from artcp import (
    AggregationKind,
    Interval,
    ScoreSeries,
    TieError,
    aggregate,
    ecdf_adjusted,
    jitter,
    np_likelihood,
    rank_cusum,
    ranks,
    scp_argmax,
)

from oracles import (
    np_likelihood_direct,
    np_likelihood_value_at,
    rank_cusum_direct,
    two_sample_likelihood,
)


def assert_split_agrees(scores, got_split: int, want_split: int):
    """Splits must match unless the oracle values at both splits tie exactly.

    The aggregation maximum can be attained at two splits simultaneously;
    float summation order then decides the argmax, so a genuine tie (equal
    oracle values to 1e-9 relative) is accepted.
    """
    if got_split == want_split:
        return
    a = np_likelihood_value_at(scores, got_split)
    b = np_likelihood_value_at(scores, want_split)
    assert a == pytest.approx(b, rel=1e-9), (got_split, want_split)

distinct_scores = st.lists(
    st.floats(-1e6, 1e6, allow_nan=False), min_size=4, max_size=20, unique=True
)


class TestInterval:
    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            Interval(3, 3)
        with pytest.raises(ValueError):
            Interval(-1, 2)

    def test_length(self):
        assert Interval(2, 7).length == 5


class TestRanks:
    def test_full_interval(self):
        rv = ranks(ScoreSeries(np.array([0.3, 0.1, 0.2])), Interval(0, 3))
        assert np.array_equal(rv.ranks, [3, 1, 2])

    def test_sub_interval(self):
        rv = ranks(ScoreSeries(np.array([0.3, 0.1, 0.2])), Interval(1, 3))
        assert np.array_equal(rv.ranks, [1, 2])

    def test_out_of_bounds(self):
        with pytest.raises(ValueError, match="exceeds"):
            ranks(ScoreSeries(np.array([1.0, 2.0])), Interval(0, 3))

    def test_ties_raise_with_jitter_hint(self):
        with pytest.raises(TieError, match="jitter"):
            ranks(ScoreSeries(np.array([1.0, 1.0, 2.0])), Interval(0, 3))

    @given(st.lists(st.integers(-5000, 5000), min_size=4, max_size=20, unique=True))
    def test_invariant_under_increasing_transform(self, grid):
        values = np.asarray(grid, dtype=np.float64) / 100.0  # spacing >= 0.01 survives exp
        base = ranks(values, Interval(0, len(grid)))
        mapped = ranks(np.exp(values), Interval(0, len(grid)))
        assert np.array_equal(base.ranks, mapped.ranks)


class TestRankCusum:
    def test_monotone_three(self):
        out = rank_cusum(ranks(np.array([10.0, 20.0, 30.0]), Interval(0, 3)))
        assert out.statistic == pytest.approx(3.0**-1.5, abs=1e-15)
        assert out.split == 1  # tie at t=2 broken to the smallest t

    def test_monotone_four(self):
        out = rank_cusum(ranks(np.array([1.0, 2.0, 3.0, 4.0]), Interval(0, 4)))
        assert out.statistic == pytest.approx(0.25, abs=1e-15)
        assert out.split == 2

    def test_absolute_split_position(self):
        scores = np.array([5.0, 1.0, 2.0, 3.0, 4.0])
        out = rank_cusum(ranks(scores, Interval(1, 5)))
        assert 1 < out.split < 5

    @given(distinct_scores)
    def test_matches_double_sum_oracle(self, values):
        scores = np.asarray(values)
        stat, split = rank_cusum_direct(scores)
        out = rank_cusum(ranks(scores, Interval(0, len(values))))
        assert out.statistic == pytest.approx(stat, rel=1e-12)
        assert out.split == split


class TestEcdfAdjusted:
    def test_single_point(self):
        assert ecdf_adjusted([5.0], 5.0) == pytest.approx(0.75)

    def test_below_everything(self):
        assert ecdf_adjusted([1.0, 2.0, 3.0], 0.0) == pytest.approx(0.5 / 4)

    def test_above_everything(self):
        assert ecdf_adjusted([1.0, 2.0, 3.0], 9.0) == pytest.approx(3.5 / 4)

    @given(distinct_scores, st.floats(-1e6, 1e6, allow_nan=False))
    def test_strictly_inside_unit_interval(self, values, point):
        f = ecdf_adjusted(values, point)
        assert 0.0 < f < 1.0


class TestNpLikelihood:
    def test_matches_direct_oracle_on_near_tied_pairs(self):
        base = ScoreSeries(np.array([1.0, 2.0, 1.0, 2.0]))
        scores = jitter(base, 1e-9, seed=3)
        out = np_likelihood(scores, Interval(0, 4))
        stat, split = np_likelihood_direct(scores.scores)
        assert out.statistic == pytest.approx(stat, rel=1e-10)
        assert out.split == split

    @given(distinct_scores)
    def test_matches_direct_oracle(self, values):
        scores = np.asarray(values)
        stat, split = np_likelihood_direct(scores)
        out = np_likelihood(scores, Interval(0, len(values)))
        assert out.statistic == pytest.approx(stat, rel=1e-10)
        assert_split_agrees(scores, out.split, split)

    @given(distinct_scores)
    def test_nonnegative(self, values):
        out = np_likelihood(np.asarray(values), Interval(0, len(values)))
        assert out.statistic >= 0.0

    def test_invariant_under_increasing_transform_bit_exact(self):
        rng = np.random.default_rng(0)
        scores = rng.normal(size=12)
        g = scores**3 + scores
        base = np_likelihood(scores, Interval(0, 12))
        mapped = np_likelihood(g, Interval(0, 12))
        assert base.statistic == mapped.statistic
        assert base.split == mapped.split

    def test_rejects_short_intervals(self):
        with pytest.raises(ValueError, match=">= 4"):
            np_likelihood(np.array([1.0, 2.0, 3.0]), Interval(0, 3))

    def test_lambda_zero_when_ecdfs_agree(self):
        # At s = 2, both halves and the pooled sample have adjusted ECDF 1/2.
        assert two_sample_likelihood([1.0, 3.0], [2.0, 4.0], 2.0) == pytest.approx(0.0, abs=1e-15)


class TestAggregate:
    def test_dispatch(self):
        scores = np.array([4.0, 1.0, 3.0, 2.0, 5.0])
        rc = aggregate(scores, Interval(0, 5), AggregationKind.RANK_CUSUM)
        np_ = aggregate(scores, Interval(0, 5), AggregationKind.NP_LIKELIHOOD)
        assert rc.kind is AggregationKind.RANK_CUSUM
        assert np_.kind is AggregationKind.NP_LIKELIHOOD
        assert rc.statistic >= 0.0 and np_.statistic >= 0.0

    def test_kind_accepts_string(self):
        scores = np.array([4.0, 1.0, 3.0, 2.0, 5.0])
        assert aggregate(scores, Interval(0, 5), "rank_cusum").kind is AggregationKind.RANK_CUSUM

    @given(distinct_scores, st.integers(0, 2**31 - 1))
    def test_depends_only_on_interval_contents(self, values, seed):
        scores = np.asarray(values)
        m = len(values)
        iv = Interval(1, m - 1)  # leave a complement on both sides
        if iv.length < 4:
            return
        rng = np.random.default_rng(seed)
        altered = scores.copy()
        altered[0] = rng.normal() * 1e5
        altered[-1] = rng.normal() * 1e5
        for kind in AggregationKind:
            a = aggregate(scores, iv, kind)
            b = aggregate(altered, iv, kind)
            assert a.statistic == b.statistic
            assert a.split == b.split

    def test_rank_only_dependence_bit_exact(self):
        rng = np.random.default_rng(1)
        scores = rng.normal(size=15)
        iv = Interval(2, 14)
        local = ranks(scores, Interval(0, 15)).ranks.astype(np.float64)
        for kind in AggregationKind:
            a = aggregate(scores, iv, kind)
            b = aggregate(local, iv, kind)
            assert a.statistic == b.statistic
            assert a.split == b.split


class TestScpArgmax:
    def test_step_up(self):
        base = ScoreSeries(np.array([0.0, 0.0, 0.0, 10.0, 10.0, 10.0]))
        scores = jitter(base, 1e-6, seed=1)
        assert scp_argmax(scores, Interval(0, 6)) == 3

    def test_step_down(self):
        base = ScoreSeries(np.array([10.0, 10.0, 10.0, 0.0, 0.0, 0.0]))
        scores = jitter(base, 1e-6, seed=1)
        assert scp_argmax(scores, Interval(0, 6)) == 3

    def test_monotone(self):
        assert scp_argmax(np.arange(1.0, 7.0), Interval(0, 6)) == 3

    @given(distinct_scores)
    def test_matches_brute_force(self, values):
        scores = np.asarray(values)
        _, split = rank_cusum_direct(scores)
        assert scp_argmax(scores, Interval(0, len(values))) == split
