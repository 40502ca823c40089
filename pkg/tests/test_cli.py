import json
import os

import numpy as np
import pytest

from hydrodeconv.cli import main
from hydrodeconv.io import (
    read_json,
    read_kernel_csv,
    read_series_csv,
    write_json,
    write_kernel_csv,
    write_series_csv,
)


def run_cli(*args):
    return main([str(a) for a in args])


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def dir_bytes(path, skip=("manifest.json",)):
    out = {}
    for name in sorted(os.listdir(path)):
        if name in skip:
            continue
        out[name] = read_bytes(os.path.join(path, name))
    return out


class TestCsvRoundTrip:
    def test_series_full_precision(self, tmp_path):
        rng = np.random.default_rng(0)
        values = rng.standard_normal(100) * 10.0 ** rng.integers(-8, 8, 100)
        path = tmp_path / "series.csv"
        write_series_csv(path, values)
        assert np.array_equal(read_series_csv(path), values)

    def test_kernel_full_precision(self, tmp_path):
        rng = np.random.default_rng(1)
        values = rng.standard_normal(64)
        path = tmp_path / "kernel.csv"
        write_kernel_csv(path, values)
        assert np.array_equal(read_kernel_csv(path), values)

    def test_kernel_header_has_signed_lags(self, tmp_path):
        path = tmp_path / "kernel.csv"
        write_kernel_csv(path, np.arange(4.0))
        lines = path.read_text().splitlines()
        assert lines[0] == "lag,value"
        assert lines[1].startswith("-2,")

    def test_parse_error_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,value\n0,1.5\n1,not_a_number\n")
        with pytest.raises(ValueError, match=r"bad\.csv:3"):
            read_series_csv(path)

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,value\n0,1.5\n")
        with pytest.raises(ValueError, match=":1"):
            read_series_csv(path)


class TestSimulate:
    def test_writes_expected_files(self, tmp_path):
        out = tmp_path / "sim"
        code = run_cli(
            "simulate", "--length", 300, "--support", 40, "--snr-db", 20,
            "--seed", 3, "--out", out,
        )
        assert code == 0
        for name in ("x.csv", "y.csv", "k_true.csv", "scenario.json", "manifest.json"):
            assert (out / name).exists()
        assert read_series_csv(out / "y.csv").size == 300
        meta = read_json(out / "scenario.json")
        assert meta["c_true"] == 100.0
        assert meta["seed"] == 3
        assert meta["params"] == {"H": -0.1, "C1": 0.4, "alpha_levy": 0.7}

    def test_infinite_snr_gives_clean_output(self, tmp_path):
        out = tmp_path / "sim"
        run_cli("simulate", "--length", 200, "--support", 20, "--snr-db", "inf",
                "--seed", 1, "--out", out)
        meta = read_json(out / "scenario.json")
        assert meta["noise_variance"] == 0.0
        assert meta["input_snr_db"] == "inf"

    def test_same_seed_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run_cli("simulate", "--length", 256, "--support", 30, "--snr-db", 15,
                    "--seed", 11, "--out", out)
        assert dir_bytes(a) == dir_bytes(b)


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("scenario") / "sim"
    assert run_cli(
        "simulate", "--length", 400, "--support", 40, "--snr-db", 25,
        "--seed", 5, "--out", out,
    ) == 0
    return out


class TestEstimate:
    def test_noise_free_fixed_lambda_recovers_kernel(self, tmp_path):
        sim = tmp_path / "clean"
        run_cli("simulate", "--length", 1000, "--support", 100, "--snr-db", "inf",
                "--seed", 2, "--out", sim)
        out = tmp_path / "est"
        code = run_cli(
            "estimate", "--input-x", sim / "x.csv", "--input-y", sim / "y.csv",
            "--kernel-length", 200, "--lambda", 1e-3,
            "--k-true", sim / "k_true.csv", "--out", out,
        )
        assert code == 0
        summary = read_json(out / "summary.json")
        assert summary["k_snr_db"] >= 30.0
        assert summary["chosen_lambda"] == 1e-3
        assert set(summary) >= {
            "c_est", "chosen_lambda", "y_rec_snr_db", "corr_coeff", "tau",
            "converged", "iterations", "runtime_seconds",
        }
        assert read_kernel_csv(out / "k_est.csv").size == 200

    def test_strategy_choice_stays_on_grid(self, sim_dir, tmp_path):
        out = tmp_path / "est"
        code = run_cli(
            "estimate", "--input-x", sim_dir / "x.csv", "--input-y", sim_dir / "y.csv",
            "--kernel-length", 80, "--strategy", "corr",
            "--grid", "1e-2,1e8,6", "--out", out,
        )
        assert code == 0
        summary = read_json(out / "summary.json")
        grid = np.logspace(-2, 8, 6)
        assert np.min(np.abs(grid - summary["chosen_lambda"])) < 1e-9 * summary["chosen_lambda"]

    def test_constant_output(self, tmp_path):
        x = np.abs(np.random.default_rng(0).standard_normal(100))
        y = np.full(100, 7.5)
        write_series_csv(tmp_path / "x.csv", x)
        write_series_csv(tmp_path / "y.csv", y)
        out = tmp_path / "est"
        code = run_cli(
            "estimate", "--input-x", tmp_path / "x.csv", "--input-y", tmp_path / "y.csv",
            "--kernel-length", 20, "--lambda", 1.0, "--out", out,
        )
        assert code == 0
        k = read_kernel_csv(out / "k_est.csv")
        assert np.array_equal(k, np.zeros(20))
        assert read_json(out / "summary.json")["c_est"] == pytest.approx(7.5, abs=1e-10)

    def test_oracle_without_truth_fails(self, sim_dir, tmp_path):
        code = run_cli(
            "estimate", "--input-x", sim_dir / "x.csv", "--input-y", sim_dir / "y.csv",
            "--kernel-length", 80, "--strategy", "oracle", "--out", tmp_path / "e",
        )
        assert code == 1

    def test_discrepancy_without_noise_variance_fails(self, sim_dir, tmp_path):
        code = run_cli(
            "estimate", "--input-x", sim_dir / "x.csv", "--input-y", sim_dir / "y.csv",
            "--kernel-length", 80, "--strategy", "discrepancy", "--out", tmp_path / "e",
        )
        assert code == 1

    def test_lambda_and_strategy_mutually_exclusive(self, sim_dir, tmp_path):
        code = run_cli(
            "estimate", "--input-x", sim_dir / "x.csv", "--input-y", sim_dir / "y.csv",
            "--kernel-length", 80, "--lambda", 1.0, "--strategy", "corr",
            "--out", tmp_path / "e",
        )
        assert code == 1

    def test_malformed_csv_fails_cleanly(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,value\n0,oops\n")
        good = tmp_path / "good.csv"
        write_series_csv(good, np.ones(5))
        code = run_cli(
            "estimate", "--input-x", bad, "--input-y", good,
            "--kernel-length", 4, "--lambda", 1.0, "--out", tmp_path / "e",
        )
        assert code == 1
        assert "bad.csv:2" in capsys.readouterr().err

    def test_length_mismatch_fails(self, tmp_path):
        write_series_csv(tmp_path / "x.csv", np.ones(5))
        write_series_csv(tmp_path / "y.csv", np.ones(6))
        code = run_cli(
            "estimate", "--input-x", tmp_path / "x.csv", "--input-y", tmp_path / "y.csv",
            "--kernel-length", 4, "--lambda", 1.0, "--out", tmp_path / "e",
        )
        assert code == 1


class TestXcorrCommand:
    def test_runs_and_writes_summary(self, sim_dir, tmp_path):
        out = tmp_path / "xc"
        code = run_cli(
            "xcorr", "--input-x", sim_dir / "x.csv", "--input-y", sim_dir / "y.csv",
            "--kernel-length", 80, "--k-true", sim_dir / "k_true.csv", "--out", out,
        )
        assert code == 0
        summary = read_json(out / "summary.json")
        assert summary["chosen_lambda"] is None
        assert "k_snr_db" in summary


class TestSweepCommand:
    def test_writes_table_and_selections(self, sim_dir, tmp_path):
        out = tmp_path / "sw"
        meta = read_json(sim_dir / "scenario.json")
        code = run_cli(
            "sweep", "--input-x", sim_dir / "x.csv", "--input-y", sim_dir / "y.csv",
            "--kernel-length", 80, "--grid", "1e-1,1e7,5",
            "--k-true", sim_dir / "k_true.csv",
            "--noise-variance", meta["noise_variance"], "--out", out,
        )
        assert code == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert len(lines) == 6  # header + 5 grid points
        selections = read_json(out / "selections.json")
        assert set(selections) == {"oracle", "discrepancy", "fidelity", "corrCoeff"}


class TestConfigAndEnv:
    def test_config_file_supplies_options_and_flags_override(self, tmp_path):
        config = tmp_path / "config.json"
        write_json(config, {"length": 200, "support": 20, "seed": 4, "snr_db": "inf"})
        out_a = tmp_path / "a"
        assert run_cli("simulate", "--config", config, "--out", out_a) == 0
        assert read_series_csv(out_a / "x.csv").size == 200

        out_b = tmp_path / "b"
        assert run_cli("simulate", "--config", config, "--length", 128,
                       "--out", out_b) == 0
        assert read_series_csv(out_b / "x.csv").size == 128

    def test_unknown_config_key_fails(self, tmp_path):
        config = tmp_path / "config.json"
        write_json(config, {"no_such_option": 1})
        assert run_cli("simulate", "--config", config, "--out", tmp_path / "o") == 1

    def test_env_var_sets_default_output_root(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HYDRODECONV_OUT", str(tmp_path))
        assert run_cli("simulate", "--length", 128, "--support", 10, "--seed", 0) == 0
        assert (tmp_path / "hydrodeconv-simulate" / "x.csv").exists()


class TestBenchCommand:
    def test_tiny_bench_outputs(self, tmp_path):
        out = tmp_path / "bench"
        code = run_cli(
            "bench", "--levels", "5,25", "--trials", 1, "--lengths", "200",
            "--support", 20, "--grid", "1e0,1e8,3", "--seed", 0, "--out", out,
        )
        assert code == 0
        trials = (out / "trials.csv").read_text().splitlines()
        # header + 2 levels * 1 trial * 5 methods
        assert len(trials) == 1 + 2 * 5
        for name in (
            "k_snr_by_level.csv",
            "lambda_by_level.csv",
            "k_snr_by_length.csv",
            "bench_summary.json",
            "manifest.json",
        ):
            assert (out / name).exists()

    def test_single_cell_bench_has_one_row_per_method(self, tmp_path):
        out = tmp_path / "bench"
        code = run_cli(
            "bench", "--levels", "20", "--trials", 1, "--lengths", "150",
            "--support", 15, "--grid", "1e2,1e2,1", "--seed", 1, "--out", out,
        )
        assert code == 0
        agg = (out / "k_snr_by_level.csv").read_text().splitlines()
        assert len(agg) == 1 + 5

    def test_bench_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run_cli(
                "bench", "--levels", "15", "--trials", 2, "--lengths", "150",
                "--support", 15, "--grid", "1e1,1e6,3", "--seed", 9, "--out", out,
            ) == 0
        assert dir_bytes(a) == dir_bytes(b)
