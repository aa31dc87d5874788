"""Command line: ingest CSV data or precomputed scores, run an analysis, emit JSON.

CSV conventions: a header row is required and each following row is one
observation. Regression files carry the response in a column named ``y``;
all other columns are features. Precomputed score files hold a single
``score`` column; candidate files a single ``candidate`` column.

Exit codes: 0 the command ran, 2 the test rejected the no-change hypothesis
(scripting convenience, ``test`` only), 1 any error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .api import (
    RunConfig,
    dumps_report,
    format_float,
    run_localize,
    run_postdetect,
    run_simulate,
    run_test,
)
from .simgen import ChangeDesign
from .transform import Dataset, ScoreSeries


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argparse variant that reports usage problems through CliError (exit 1)."""

    def error(self, message):
        raise CliError(message)


def _read_table(path: str, allow_empty: bool = False) -> tuple[list[str], np.ndarray]:
    """Parse a numeric CSV with header; report the offending line and column."""
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        try:
            with open(path, newline="") as handle:
                lines = handle.read().splitlines()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(lines)
    try:
        header = [cell.strip() for cell in next(reader)]
    except StopIteration:
        raise CliError(f"{path}: empty file") from None
    width = len(header)
    rows: list[list[float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != width:
            raise CliError(f"{path}: line {lineno}: expected {width} columns, got {len(row)}")
        values = []
        for j, cell in enumerate(row):
            try:
                values.append(float(cell))
            except ValueError:
                raise CliError(
                    f"{path}: line {lineno}, column {header[j]!r}: non-numeric value {cell.strip()!r}"
                ) from None
        rows.append(values)
    if not rows:
        if allow_empty:
            return header, np.empty((0, width))
        raise CliError(f"{path}: no data rows")
    return header, np.asarray(rows, dtype=np.float64)


def _load_dataset(path: str, data_kind: str) -> Dataset:
    header, matrix = _read_table(path)
    if data_kind == "auto":
        data_kind = "regression" if "y" in header else "vector"
    if data_kind == "regression":
        if "y" not in header:
            raise CliError(f"{path}: regression input needs a column named 'y'")
        y_idx = header.index("y")
        feature_cols = [j for j in range(len(header)) if j != y_idx]
        if not feature_cols:
            raise CliError(f"{path}: regression input needs at least one feature column")
        return Dataset(kind="regression", matrix=matrix[:, feature_cols], response=matrix[:, y_idx])
    return Dataset(kind="vector", matrix=matrix)


def _load_scores(path: str) -> ScoreSeries:
    header, matrix = _read_table(path)
    if header != ["score"]:
        raise CliError(f"{path}: precomputed scores need exactly one column named 'score'")
    return ScoreSeries(scores=matrix[:, 0])


def _load_candidates(path: str) -> list[int]:
    header, matrix = _read_table(path, allow_empty=True)
    if header != ["candidate"]:
        raise CliError(f"{path}: candidates need exactly one column named 'candidate'")
    values = matrix[:, 0]
    if not np.all(values == np.round(values)):
        raise CliError(f"{path}: candidate positions must be integers")
    return [int(v) for v in values]


def _write_csv(path: str, header: list[str], matrix: np.ndarray) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in matrix:
            writer.writerow([format_float(float(v)) for v in row])


def write_dataset_csv(dataset: Dataset, path: str) -> None:
    if dataset.kind == "regression":
        header = ["y"] + [f"x{j + 1}" for j in range(dataset.d)]
        matrix = np.column_stack([dataset.response, dataset.matrix])
    else:
        header = [f"x{j + 1}" for j in range(dataset.d)]
        matrix = dataset.matrix
    _write_csv(path, header, matrix)


def write_scores_csv(scores: ScoreSeries, path: str) -> None:
    _write_csv(path, ["score"], scores.scores.reshape(-1, 1))


def _add_analysis_options(sub: argparse.ArgumentParser, command: str) -> None:
    sub.add_argument("--input", help="CSV of observations ('-' for stdin)")
    sub.add_argument("--scores", help="CSV of precomputed scores (bypasses transforms)")
    sub.add_argument("--data-kind", default="auto", choices=["auto", "vector", "regression"])
    sub.add_argument(
        "--transform",
        default="auto",
        choices=["auto", "identity", "gaussian", "residual", "kmeans"],
    )
    sub.add_argument("--center", default="mean", choices=["mean", "zero"])
    sub.add_argument("--agg", default="rank_cusum", choices=["rank_cusum", "np_likelihood"])
    default_intervals = {"test": "moving", "localize": "seeded", "postdetect": "sliding"}[command]
    sub.add_argument(
        "--intervals",
        default=default_intervals,
        choices=["moving", "sliding", "seeded", "all", "full"],
    )
    sub.add_argument("--h", type=int, default=None, help="window half-width (default n // 10)")
    sub.add_argument("--decay", type=float, default=2.0**-0.5)
    sub.add_argument("--min-len", type=int, default=4)
    sub.add_argument("--alpha", type=float, default=0.1)
    sub.add_argument("--B", type=int, default=200)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--jitter-epsilon", type=float, default=1e-6)
    sub.add_argument("--k", default="auto")
    sub.add_argument("--k-max", type=int, default=8)
    sub.add_argument("--screen", default="none", choices=["none", "top_fraction", "nonzero_lasso"])
    sub.add_argument("--screen-fraction", type=float, default=0.1)
    sub.add_argument("--lasso-lambda", default="auto")
    sub.add_argument("--threads", type=int, default=None, help="fallback: ART_THREADS, else 1")
    sub.add_argument("--output", help="also write the JSON report to this path")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("ART_THREADS", "1"))
    k = args.k if args.k == "auto" else int(args.k)
    lam = args.lasso_lambda if args.lasso_lambda == "auto" else float(args.lasso_lambda)
    return RunConfig(
        transform=args.transform,
        center=args.center,
        kind=args.agg,
        intervals=args.intervals,
        h=args.h,
        decay=args.decay,
        min_len=args.min_len,
        alpha=args.alpha,
        B=args.B,
        seed=args.seed,
        jitter_epsilon=args.jitter_epsilon,
        k=k,
        k_max=args.k_max,
        screen=args.screen,
        screen_fraction=args.screen_fraction,
        lasso_lambda=lam,
        scp=getattr(args, "scp", "rank_cusum"),
        threads=threads,
    )


def _load_inputs(args: argparse.Namespace) -> tuple[Dataset | None, ScoreSeries | None]:
    if (args.input is None) == (args.scores is None):
        raise CliError("provide exactly one of --input or --scores")
    if args.scores is not None:
        return None, _load_scores(args.scores)
    return _load_dataset(args.input, args.data_kind), None


def _emit(report: dict, output: str | None) -> None:
    text = dumps_report(report) + "\n"
    sys.stdout.write(text)
    if output:
        with open(output, "w") as handle:
            handle.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="art", description="Distribution-free changepoint testing and localization."
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_test = sub.add_parser("test", help="test for the presence of changepoints")
    _add_analysis_options(p_test, "test")

    p_loc = sub.add_parser("localize", help="localize changepoint regions")
    _add_analysis_options(p_loc, "localize")
    p_loc.add_argument("--scp", default="rank_cusum", choices=["rank_cusum", "np_likelihood"])

    p_post = sub.add_parser("postdetect", help="validate detected changepoints")
    _add_analysis_options(p_post, "postdetect")
    p_post.add_argument("--candidates", required=True, help="CSV with a 'candidate' column")

    p_sim = sub.add_parser("simulate", help="generate synthetic changepoint data")
    p_sim.add_argument("--model", required=True, choices=["mean", "regression", "distribution"])
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--d", type=int, default=1)
    p_sim.add_argument("--tau", default="", help="comma-separated changepoint positions")
    p_sim.add_argument("--s", type=int, default=1)
    p_sim.add_argument("--c-theta", type=float, default=1.0)
    p_sim.add_argument("--c-p", type=float, default=1.0)
    p_sim.add_argument("--error", default="normal", choices=["normal", "t3", "lognormal"])
    p_sim.add_argument("--pattern", default="covariance", choices=["covariance", "full", "partial"])
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--output", required=True, help="CSV path for the generated data")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            taus = tuple(int(t) for t in args.tau.split(",") if t.strip())
            design = ChangeDesign(
                model=args.model,
                n=args.n,
                d=args.d,
                tau_star=taus,
                s=args.s,
                c_theta=args.c_theta,
                c_p=args.c_p,
                error_law=args.error,
                pattern=args.pattern,
                seed=args.seed,
            )
            result, report = run_simulate(design)
            write_dataset_csv(result.dataset, args.output)
            design_path = args.output + ".design.json"
            with open(design_path, "w") as handle:
                handle.write(dumps_report(report) + "\n")
            _emit(report, None)
            return 0

        config = _config_from_args(args)
        data, scores = _load_inputs(args)
        if args.command == "test":
            report = run_test(data=data, scores=scores, config=config)
            _emit(report, args.output)
            return 2 if report["reject"] else 0
        if args.command == "localize":
            report = run_localize(data=data, scores=scores, config=config)
            _emit(report, args.output)
            return 0
        if args.command == "postdetect":
            candidates = _load_candidates(args.candidates)
            report = run_postdetect(
                data=data, scores=scores, candidates=candidates, h=args.h, config=config
            )
            _emit(report, args.output)
            return 0
        raise CliError(f"unknown command {args.command!r}")
    except (CliError, ValueError, RuntimeError) as exc:
        print(f"art: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
