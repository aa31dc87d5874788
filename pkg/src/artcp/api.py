"""High-level run functions shared by the command line and the array bindings.

Reports are plain dicts with deterministic key order; ``dumps_report``
serializes floats with 17 significant digits so every value round-trips
exactly and identical runs produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from ._version import __version__
from .kmeans import kmeans_label_scores
from .lasso import lasso_fit
from .localize import localize
from .multiscale import (
    DEFAULT_SEEDED_DECAY,
    IntervalSet,
    PermutationPlan,
    full_interval,
    gen_all_subintervals,
    gen_moving_windows,
    gen_seeded_intervals,
    gen_sliding_windows,
    multiscale_stats,
    p_value_multi,
)
from .postdetect import CandidateSet, tune_filter
from .rankagg import AggregationKind
from .simgen import ChangeDesign, SimResult, generate
from .transform import (
    Dataset,
    ScoreSeries,
    gaussian_deviance_scores,
    identity_scores,
    jitter,
    residual_scores,
    screen_features,
)

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Analysis settings; defaults follow the recommended nominal values."""

    transform: str = "auto"  # auto | identity | gaussian | residual | kmeans | scores
    center: str = "mean"  # gaussian deviance centering: mean | zero
    kind: str = "rank_cusum"
    intervals: str = "auto"  # auto | moving | sliding | seeded | all | full
    h: int | None = None
    decay: float = DEFAULT_SEEDED_DECAY
    min_len: int = 4
    alpha: float = 0.1
    B: int = 200
    seed: int = 0
    jitter_epsilon: float = 1e-6
    k: int | str = "auto"
    k_max: int = 8
    screen: str = "none"  # none | top_fraction | nonzero_lasso
    screen_fraction: float = 0.1
    lasso_lambda: float | str = "auto"
    scp: str = "rank_cusum"
    threads: int = 1

    def aggregation(self) -> AggregationKind:
        return AggregationKind(self.kind)

    def config_hash(self) -> str:
        semantic = asdict(self)
        semantic.pop("threads")  # results are thread-count invariant by contract
        payload = json.dumps(semantic, sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def default_window(n: int) -> int:
    return max(2, n // 10)


def prepare_scores(
    data: Dataset | None, scores: ScoreSeries | None, config: RunConfig
) -> ScoreSeries:
    """Transform observations into scores and jitter only if ties remain."""
    if (data is None) == (scores is None):
        raise ValueError("provide exactly one of data or scores")
    if scores is None:
        scores = _transform(data, config)
    if scores.has_ties():
        scores = jitter(scores, config.jitter_epsilon, config.seed)
    return scores


def _transform(data: Dataset, config: RunConfig) -> ScoreSeries:
    name = config.transform
    if name == "auto":
        if data.kind == "regression":
            name = "residual"
        elif data.d == 1:
            name = "identity"
        else:
            name = "gaussian"
    if name == "identity":
        return identity_scores(data)
    if name == "gaussian":
        theta = np.zeros(data.d) if config.center == "zero" else None
        return gaussian_deviance_scores(data, theta)
    if name == "residual":
        fit = lasso_fit(data, config.lasso_lambda)
        return residual_scores(data, fit.coefficients)
    if name == "kmeans":
        working = data
        if config.screen == "top_fraction":
            working = screen_features(data, "top_fraction", fraction=config.screen_fraction).data
        elif config.screen == "nonzero_lasso":
            fit = lasso_fit(data, config.lasso_lambda)
            working = screen_features(data, "nonzero_lasso", fit=fit).data
        elif config.screen != "none":
            raise ValueError(f"unknown screening rule {config.screen!r}")
        return kmeans_label_scores(working, k=config.k, k_max=config.k_max)
    raise ValueError(f"unknown transform {name!r}")


def build_intervals(config: RunConfig, n: int, command: str) -> IntervalSet:
    strategy = config.intervals
    if strategy == "auto":
        strategy = "seeded" if command == "localize" else "moving"
    h = config.h if config.h is not None else default_window(n)
    if strategy == "moving":
        return gen_moving_windows(n, h)
    if strategy == "sliding":
        return gen_sliding_windows(n, h)
    if strategy == "seeded":
        return gen_seeded_intervals(n, config.decay)
    if strategy == "all":
        return gen_all_subintervals(n, config.min_len)
    if strategy == "full":
        return full_interval(n)
    raise ValueError(f"unknown interval strategy {strategy!r}")


def _base_report(command: str, config: RunConfig) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "alpha": config.alpha,
        "B": config.B,
        "seed": config.seed,
        "config_hash": config.config_hash(),
    }


def _jitter_info(scores: ScoreSeries) -> dict:
    return {
        "applied": scores.jitter_applied,
        "epsilon": scores.jitter_epsilon if scores.jitter_applied else None,
    }


def run_test(
    data: Dataset | None = None,
    scores: ScoreSeries | None = None,
    config: RunConfig | None = None,
) -> dict:
    """Multi-interval changepoint test; rejects when the p-value falls below alpha."""
    config = config or RunConfig()
    prepared = prepare_scores(data, scores, config)
    intervals = build_intervals(config, prepared.n, "test")
    plan = PermutationPlan(B=config.B, master_seed=config.seed)
    kind = config.aggregation()
    statistic = float(multiscale_stats(prepared, intervals, kind).max())
    pval = p_value_multi(prepared, intervals, kind, plan, config.threads)
    report = _base_report("test", config)
    report.update(
        {
            "n": prepared.n,
            "kind": kind.value,
            "intervals_used": {"strategy": intervals.strategy, "count": len(intervals)},
            "jitter": _jitter_info(prepared),
            "statistic": statistic,
            "p_value": pval.value,
            "reject": bool(pval.value < config.alpha),
        }
    )
    return report


def run_localize(
    data: Dataset | None = None,
    scores: ScoreSeries | None = None,
    config: RunConfig | None = None,
) -> dict:
    """Narrowest-over-threshold localization report."""
    config = config or RunConfig()
    prepared = prepare_scores(data, scores, config)
    intervals = build_intervals(config, prepared.n, "localize")
    plan = PermutationPlan(B=config.B, master_seed=config.seed)
    result = localize(
        prepared,
        intervals,
        config.aggregation(),
        config.alpha,
        plan,
        scp_kind=AggregationKind(config.scp),
        threads=config.threads,
    )
    report = _base_report("localize", config)
    report.update(
        {
            "n": prepared.n,
            "kind": config.aggregation().value,
            "intervals_used": {"strategy": intervals.strategy, "count": len(intervals)},
            "jitter": _jitter_info(prepared),
            "threshold": None if result.degenerate else result.threshold.t_alpha_B,
            "degenerate": result.degenerate,
            "regions": [
                {"start": r.start, "end": r.end, "statistic": stat}
                for r, stat in zip(result.regions, result.region_statistics)
            ],
            "changepoints": list(result.changepoints),
        }
    )
    return report


def run_postdetect(
    data: Dataset | None = None,
    scores: ScoreSeries | None = None,
    candidates: list[int] | tuple[int, ...] = (),
    h: int | None = None,
    config: RunConfig | None = None,
) -> dict:
    """Validate candidate changepoints against the sliding-window threshold."""
    config = config or RunConfig()
    prepared = prepare_scores(data, scores, config)
    window = h if h is not None else (config.h if config.h is not None else default_window(prepared.n))
    plan = PermutationPlan(B=config.B, master_seed=config.seed)
    report_obj = tune_filter(
        prepared,
        CandidateSet(candidates=tuple(candidates), h=window),
        config.aggregation(),
        config.alpha,
        plan,
        config.threads,
    )
    crit = report_obj.threshold
    report = _base_report("postdetect", config)
    report.update(
        {
            "n": prepared.n,
            "kind": config.aggregation().value,
            "h": window,
            "jitter": _jitter_info(prepared),
            "threshold": None if crit.degenerate else crit.t_alpha_B,
            "degenerate": crit.degenerate,
            "candidates": list(report_obj.candidates),
            "per_candidate_statistics": list(report_obj.statistics),
            "retained": list(report_obj.retained),
            "dropped": list(report_obj.dropped),
        }
    )
    return report


def run_simulate(design: ChangeDesign) -> tuple[SimResult, dict]:
    """Generate a synthetic dataset and its design echo report."""
    result = generate(design)
    report = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "command": "simulate",
        "design": {
            "model": design.model,
            "n": design.n,
            "d": design.d,
            "k_star": design.k_star,
            "tau_star": list(design.tau_star),
            "s": design.s,
            "c_theta": design.c_theta,
            "c_p": design.c_p,
            "error_law": design.error_law,
            "pattern": design.pattern if design.model == "distribution" else None,
            "seed": design.seed,
        },
    }
    return result, report


def format_float(value: float) -> str:
    """17-significant-digit decimal rendering; exact float round-trip."""
    if math.isnan(value) or math.isinf(value):
        raise ValueError("reports must not contain NaN or infinite values")
    return format(value, ".17g")


def dumps_report(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, 17-digit floats."""
    pieces: list[str] = []
    _emit(obj, pieces)
    return "".join(pieces)


def _emit(obj, pieces: list[str]) -> None:
    if obj is None:
        pieces.append("null")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(format_float(float(obj)))
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, dict):
        pieces.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                pieces.append(", ")
            pieces.append(json.dumps(str(key)))
            pieces.append(": ")
            _emit(value, pieces)
        pieces.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        pieces.append("[")
        for i, value in enumerate(obj):
            if i:
                pieces.append(", ")
            _emit(value, pieces)
        pieces.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
