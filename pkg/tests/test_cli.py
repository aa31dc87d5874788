import json
import subprocess
import sys

import numpy as np
import pytest
import scipy.stats

from artcp import ChangeDesign, Dataset, RunConfig, ScoreSeries, run_simulate, run_test
from artcp.api import dumps_report
from artcp.cli import main, write_dataset_csv, write_scores_csv


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "artcp.cli", *args], capture_output=True, text=True
    )


@pytest.fixture()
def noise_csv(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "noise.csv"
    write_dataset_csv(Dataset.vector(rng.normal(size=80)), str(path))
    return str(path)


class TestCsvParsing:
    def test_ragged_row_names_line(self, tmp_path):
        bad = tmp_path / "ragged.csv"
        bad.write_text("x1,x2\n1.0,2.0\n3.0\n")
        result = run_cli("test", "--input", str(bad))
        assert result.returncode == 1
        assert "line 3" in result.stderr

    def test_non_numeric_cell_names_line_and_column(self, tmp_path):
        bad = tmp_path / "nonnum.csv"
        bad.write_text("x1,x2\n1.0,2.0\n3.0,oops\n")
        result = run_cli("test", "--input", str(bad))
        assert result.returncode == 1
        assert "line 3" in result.stderr and "x2" in result.stderr

    def test_missing_file(self):
        result = run_cli("test", "--input", "/nonexistent/data.csv")
        assert result.returncode == 1

    def test_stdin_input(self, noise_csv):
        with open(noise_csv) as fh:
            content = fh.read()
        result = subprocess.run(
            [sys.executable, "-m", "artcp.cli", "test", "--input", "-", "--B", "40"],
            input=content,
            capture_output=True,
            text=True,
        )
        assert result.returncode in (0, 2)
        json.loads(result.stdout)


class TestDeterminism:
    def test_repeated_runs_byte_identical(self, noise_csv):
        args = ("test", "--input", noise_csv, "--alpha", "0.1", "--B", "60", "--seed", "7")
        first = run_cli(*args)
        second = run_cli(*args)
        assert first.stdout == second.stdout
        assert first.returncode == second.returncode

    def test_thread_count_invariance(self, noise_csv):
        outputs = []
        for threads in ("1", "4", "8"):
            result = run_cli(
                "localize", "--input", noise_csv, "--B", "50", "--seed", "3",
                "--threads", threads,
            )
            outputs.append(result.stdout)
        assert outputs[0] == outputs[1] == outputs[2]

    def test_env_threads_fallback(self, noise_csv):
        import os

        env = dict(os.environ, ART_THREADS="4")
        result = subprocess.run(
            [sys.executable, "-m", "artcp.cli", "test", "--input", noise_csv, "--B", "40"],
            capture_output=True, text=True, env=env,
        )
        baseline = run_cli("test", "--input", noise_csv, "--B", "40")
        assert result.stdout == baseline.stdout


class TestTestCommand:
    def test_big_jump_rejects_with_exit_two(self, tmp_path):
        rng = np.random.default_rng(1)
        values = rng.normal(size=100)
        values[50:] += 8.0
        path = tmp_path / "jump.csv"
        write_dataset_csv(Dataset.vector(values), str(path))
        result = run_cli("test", "--input", str(path), "--B", "100")
        assert result.returncode == 2
        report = json.loads(result.stdout)
        assert report["reject"] is True
        assert report["schema"] == 1

    def test_big_jump_rejects_across_seeds(self):
        rejections = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            values = rng.normal(size=100)
            values[50:] += 8.0
            report = run_test(
                data=Dataset.vector(values), config=RunConfig(B=100, seed=seed)
            )
            rejections += report["reject"]
        assert rejections == 100

    def test_report_embeds_replay_fields(self, noise_csv):
        result = run_cli("test", "--input", noise_csv, "--B", "40", "--seed", "5")
        report = json.loads(result.stdout)
        for key in ("schema", "version", "alpha", "B", "seed", "config_hash"):
            assert key in report

    def test_output_file_matches_stdout(self, noise_csv, tmp_path):
        out = tmp_path / "report.json"
        result = run_cli(
            "test", "--input", noise_csv, "--B", "40", "--output", str(out)
        )
        assert out.read_text() == result.stdout

    def test_invalid_window_errors(self, noise_csv):
        result = run_cli("test", "--input", noise_csv, "--h", "60")
        assert result.returncode == 1
        assert "h" in result.stderr


class TestScoresPassthrough:
    def test_scores_file_bypasses_transforms(self, tmp_path):
        rng = np.random.default_rng(2)
        values = rng.normal(size=60)
        path = tmp_path / "scores.csv"
        write_scores_csv(ScoreSeries(values), str(path))
        via_file = run_cli("localize", "--scores", str(path), "--B", "50", "--seed", "1")
        from artcp import run_localize

        report = run_localize(
            scores=ScoreSeries(values), config=RunConfig(B=50, seed=1, intervals="seeded")
        )
        assert json.loads(via_file.stdout) == json.loads(dumps_report(report))

    def test_both_inputs_rejected(self, tmp_path, noise_csv):
        path = tmp_path / "scores.csv"
        write_scores_csv(ScoreSeries(np.arange(10.0)), str(path))
        result = run_cli("test", "--input", noise_csv, "--scores", str(path))
        assert result.returncode == 1

    def test_wrong_scores_header(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("value\n1.0\n2.0\n")
        result = run_cli("test", "--scores", str(path))
        assert result.returncode == 1
        assert "score" in result.stderr


class TestPostdetectCommand:
    def test_vacuous_candidates(self, tmp_path, noise_csv):
        cands = tmp_path / "cands.csv"
        cands.write_text("candidate\n")
        result = run_cli(
            "postdetect", "--input", noise_csv, "--candidates", str(cands), "--h", "10",
            "--B", "50",
        )
        assert result.returncode == 0
        report = json.loads(result.stdout)
        assert report["retained"] == [] and report["candidates"] == []
        assert report["threshold"] is not None

    def test_out_of_bounds_candidate(self, tmp_path, noise_csv):
        cands = tmp_path / "cands.csv"
        cands.write_text("candidate\n3\n")
        result = run_cli(
            "postdetect", "--input", noise_csv, "--candidates", str(cands), "--h", "10",
            "--B", "50",
        )
        assert result.returncode == 1
        assert "candidate" in result.stderr

    def test_reports_retained_and_dropped(self, tmp_path):
        rng = np.random.default_rng(3)
        values = rng.normal(size=200)
        values[100:] += 10.0
        data_path = tmp_path / "step.csv"
        write_dataset_csv(Dataset.vector(values), str(data_path))
        cands = tmp_path / "cands.csv"
        cands.write_text("candidate\n100\n30\n")
        result = run_cli(
            "postdetect", "--input", str(data_path), "--candidates", str(cands),
            "--h", "30", "--B", "100", "--seed", "4",
        )
        assert result.returncode == 0
        report = json.loads(result.stdout)
        assert report["candidates"] == [30, 100]
        assert 100 in report["retained"]
        assert 30 in report["dropped"]


class TestSimulateCommand:
    def test_writes_csv_and_design_echo(self, tmp_path):
        out = tmp_path / "sim.csv"
        result = run_cli(
            "simulate", "--model", "mean", "--n", "50", "--d", "2", "--tau", "25",
            "--s", "1", "--c-theta", "2.0", "--seed", "9", "--output", str(out),
        )
        assert result.returncode == 0
        report = json.loads(result.stdout)
        assert report["design"]["model"] == "mean"
        assert report["design"]["tau_star"] == [25]
        assert report["design"]["k_star"] == 1
        design_file = json.loads((tmp_path / "sim.csv.design.json").read_text())
        assert design_file == report
        header, *rows = out.read_text().splitlines()
        assert header == "x1,x2"
        assert len(rows) == 50

    def test_bad_enum_value_exits_one(self, tmp_path):
        result = run_cli(
            "simulate", "--model", "banana", "--n", "50", "--output",
            str(tmp_path / "x.csv"),
        )
        assert result.returncode == 1

    def test_csv_roundtrip_is_exact(self, tmp_path):
        out = tmp_path / "sim.csv"
        run_cli(
            "simulate", "--model", "mean", "--n", "30", "--d", "1", "--seed", "5",
            "--output", str(out),
        )
        design = ChangeDesign(model="mean", n=30, d=1, seed=5)
        expected = run_simulate(design)[0].dataset.matrix
        from artcp.cli import _read_table

        _, matrix = _read_table(str(out))
        assert matrix.tobytes() == expected.tobytes()

    def test_simulate_then_test_null_p_values_uniform(self):
        p_values = []
        for seed in range(200):
            design = ChangeDesign(model="mean", n=60, d=1, error_law="lognormal", seed=seed)
            sim, _ = run_simulate(design)
            report = run_test(data=sim.dataset, config=RunConfig(B=99, seed=seed))
            p_values.append(report["p_value"])
        result = scipy.stats.kstest(p_values, "uniform")
        assert result.pvalue > 0.01


def test_main_returns_int_in_process(noise_csv, capsys):
    code = main(["test", "--input", noise_csv, "--B", "40"])
    assert code in (0, 2)
    out = capsys.readouterr().out
    json.loads(out)
