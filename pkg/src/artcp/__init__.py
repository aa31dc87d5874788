"""Distribution-free changepoint analysis via aggregated ranks of transformed scores."""

from ._version import __version__
from .api import RunConfig, dumps_report, run_localize, run_postdetect, run_simulate, run_test
from .kmeans import KMeansResult, kmeans_label_scores, kmeans_scores
from .lasso import LassoFit, auto_lambda, lasso_fit, soft_threshold
from .localize import LocalizationResult, containment_subset, localize, narrowest_search
from .multiscale import (
    IntervalSet,
    PermutationPlan,
    PValue,
    ThresholdResult,
    explicit_intervals,
    full_interval,
    g_of_permutation,
    gen_all_subintervals,
    gen_moving_windows,
    gen_seeded_intervals,
    gen_sliding_windows,
    multiscale_stats,
    p_value_multi,
    p_value_single,
    replicate_max_stats,
    threshold,
)
from .postdetect import CandidateSet, ValidationReport, tune_filter
from .rankagg import (
    AggregationKind,
    AggregationOutcome,
    Interval,
    RankVector,
    aggregate,
    ecdf_adjusted,
    np_likelihood,
    rank_cusum,
    ranks,
    scp_argmax,
)
from .simgen import (
    ChangeDesign,
    SimResult,
    gen_dist_change,
    gen_mean_change,
    gen_regression_change,
    generate,
)
from .transform import (
    Dataset,
    ScoreSeries,
    ScreenResult,
    TieError,
    gaussian_deviance_scores,
    identity_scores,
    jitter,
    residual_scores,
    screen_features,
)

__all__ = [
    "__version__",
    "AggregationKind",
    "AggregationOutcome",
    "CandidateSet",
    "ChangeDesign",
    "Dataset",
    "Interval",
    "IntervalSet",
    "KMeansResult",
    "LassoFit",
    "LocalizationResult",
    "PValue",
    "PermutationPlan",
    "RankVector",
    "RunConfig",
    "ScoreSeries",
    "ScreenResult",
    "SimResult",
    "ThresholdResult",
    "TieError",
    "ValidationReport",
    "aggregate",
    "auto_lambda",
    "containment_subset",
    "dumps_report",
    "ecdf_adjusted",
    "explicit_intervals",
    "full_interval",
    "g_of_permutation",
    "gaussian_deviance_scores",
    "gen_all_subintervals",
    "gen_dist_change",
    "gen_mean_change",
    "gen_moving_windows",
    "gen_regression_change",
    "gen_seeded_intervals",
    "gen_sliding_windows",
    "generate",
    "identity_scores",
    "jitter",
    "kmeans_label_scores",
    "kmeans_scores",
    "lasso_fit",
    "localize",
    "multiscale_stats",
    "narrowest_search",
    "np_likelihood",
    "p_value_multi",
    "p_value_single",
    "rank_cusum",
    "ranks",
    "replicate_max_stats",
    "residual_scores",
    "run_localize",
    "run_postdetect",
    "run_simulate",
    "run_test",
    "scp_argmax",
    "screen_features",
    "soft_threshold",
    "threshold",
    "tune_filter",
]
