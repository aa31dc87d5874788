"""Array-first bindings for the changepoint analysis core.

Four functions wrap the core run entry points for notebook and CI use:
``py_test``, ``py_localize``, ``py_postdetect``, and ``py_simulate``. Inputs
are plain numpy arrays (or lists); outputs are the exact report mappings the
``art`` command line serializes, with every float passed through unmodified.
The binding layer validates shapes and finiteness and never recomputes or
transforms any numeric result.
"""

from __future__ import annotations

import numpy as np

from artcp import (
    ChangeDesign,
    Dataset,
    RunConfig,
    ScoreSeries,
    run_localize,
    run_postdetect,
    run_simulate,
    run_test,
)
from artcp import __version__ as _core_version

__version__ = _core_version

__all__ = ["py_test", "py_localize", "py_postdetect", "py_simulate", "__version__"]


def _as_finite_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _prepare_inputs(data, response, scores):
    if (data is None) == (scores is None):
        raise ValueError("provide exactly one of data or scores")
    if scores is not None:
        arr = _as_finite_array(scores, "scores")
        if arr.ndim != 1:
            raise ValueError("scores must be a 1-d array")
        return None, ScoreSeries(scores=arr)
    arr = _as_finite_array(data, "data")
    if arr.ndim not in (1, 2):
        raise ValueError("data must be a 1-d or 2-d array")
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)  # (n,) input takes the univariate identity path
    if response is not None:
        y = _as_finite_array(response, "response")
        return Dataset.regression(y, arr), None
    return Dataset.vector(arr), None


def _config(overrides) -> RunConfig:
    return RunConfig(**overrides)


def py_test(data=None, *, response=None, scores=None, **overrides) -> dict:
    """Changepoint test on arrays; returns the core report mapping unchanged."""
    dataset, score_series = _prepare_inputs(data, response, scores)
    return run_test(data=dataset, scores=score_series, config=_config(overrides))


def py_localize(data=None, *, response=None, scores=None, **overrides) -> dict:
    """Changepoint localization on arrays; mirrors the command-line JSON."""
    dataset, score_series = _prepare_inputs(data, response, scores)
    return run_localize(data=dataset, scores=score_series, config=_config(overrides))


def py_postdetect(
    data=None, *, candidates, h=None, response=None, scores=None, **overrides
) -> dict:
    """Candidate validation on arrays; mirrors the command-line JSON."""
    dataset, score_series = _prepare_inputs(data, response, scores)
    if h is not None:
        overrides["h"] = h  # keep the window in the config so hashes match the CLI
    return run_postdetect(
        data=dataset,
        scores=score_series,
        candidates=tuple(int(c) for c in candidates),
        config=_config(overrides),
    )


def py_simulate(**design_fields) -> dict:
    """Synthetic data generation; the design echo plus the raw arrays."""
    result, report = run_simulate(ChangeDesign(**design_fields))
    out = dict(report)
    out["matrix"] = result.dataset.matrix
    out["response"] = result.dataset.response
    return out
