import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from hdwhite.cli import main
from hdwhite.exceptions import SeriesFileError
from hdwhite.io import read_report, read_series_csv, write_series_csv

REPORT_ORDER_KEYS = {"a", "u_raw", "sigma_hat", "sigma_used", "z", "p_value", "reject", "error"}
REPORT_KEYS = {"input", "config", "p", "T", "standardizer", "orders", "adaptive", "software",
               "wall_time_seconds"}


class TestSeriesFile:
    def test_shape(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,2\n3,4\n5,6\n")
        x = read_series_csv(f)
        assert x.shape == (2, 3)
        assert_array_equal(x[:, 0], [1, 2])

    def test_header(self, tmp_path):
        plain = tmp_path / "a.csv"
        plain.write_text("1,2\n3,4\n5,6\n")
        headed = tmp_path / "b.csv"
        headed.write_text("s1,s2\n1,2\n3,4\n5,6\n")
        assert_array_equal(read_series_csv(headed, has_header=True), read_series_csv(plain))

    @pytest.mark.parametrize("text,row,col", [
        ("1,2\n3,NaN\n", 2, 2),
        ("1,2\n3,inf\n", 2, 2),
        ("1,2\nx,4\n", 2, 1),
        ("1,2\n3\n", 2, None),
    ])
    def test_bad_cells(self, tmp_path, text, row, col):
        f = tmp_path / "bad.csv"
        f.write_text(text)
        with pytest.raises(SeriesFileError) as err:
            read_series_csv(f)
        assert err.value.row == row and err.value.column == col

    def test_empty(self, tmp_path):
        f = tmp_path / "empty.csv"
        f.write_text("")
        with pytest.raises(SeriesFileError, match="no data"):
            read_series_csv(f)

    def test_lossless_round_trip(self, tmp_path, rng):
        x = rng.standard_normal((3, 20)) * 10.0 ** rng.integers(-8, 8, size=(3, 20))
        f = tmp_path / "x.csv"
        write_series_csv(x, f)
        assert_array_equal(read_series_csv(f), x)


class TestCli:
    def test_simulate_deterministic(self, tmp_path):
        args = ["simulate", "--model", "null", "--p", "2", "--T", "10", "--cov", "identity",
                "--innov", "gaussian", "--seed", "7"]
        assert main(args + ["--output", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["--output", str(tmp_path / "b.csv")]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert read_series_csv(tmp_path / "a.csv").shape == (2, 10)

    @pytest.mark.parametrize("args", [
        ["simulate", "--model", "null", "--p", "2", "--T", "10", "--coeff", "dense"],
        ["simulate", "--model", "var1", "--p", "2", "--T", "10"],
        ["test", "--bogus"],
        ["frobnicate"],
    ])
    def test_usage_errors_exit_2(self, args):
        with pytest.raises(SystemExit) as exc:
            main(args)
        assert exc.value.code == 2

    def test_runtime_error_exit_1(self, tmp_path, capsys):
        f = tmp_path / "bad.csv"
        f.write_text("1,2\n3,oops\n")
        assert main(["test", "--input", str(f)]) == 1
        assert "row 2" in capsys.readouterr().err

    def test_test_report(self, tmp_path, capsys):
        data = tmp_path / "x.csv"
        assert main(["simulate", "--model", "null", "--p", "5", "--T", "40", "--seed", "1",
                     "--output", str(data)]) == 0
        out = tmp_path / "r.json"
        assert main(["test", "--input", str(data), "--orders", "2,4", "--output", str(out)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3 and lines[0].startswith("U_q(2)")
        report = read_report(out)
        assert set(report) == REPORT_KEYS
        assert set(report["orders"]) == {"2", "4"}
        for entry in report["orders"].values():
            assert set(entry) == REPORT_ORDER_KEYS
            assert entry["z"] == entry["u_raw"] / entry["sigma_hat"]
        assert report["config"]["orders"] == [2, 4]

    def test_report_round_trips_floats(self, tmp_path):
        from hdwhite.ustat import run_test

        data = tmp_path / "x.csv"
        main(["simulate", "--model", "var1", "--coeff", "dense", "--p", "6", "--T", "50",
              "--seed", "2", "--output", str(data)])
        out = tmp_path / "r.json"
        main(["test", "--input", str(data), "--output", str(out)])
        report = read_report(out)
        direct = run_test(read_series_csv(data))
        for a, r in direct.orders.items():
            assert report["orders"][str(a)]["u_raw"] == r.u_raw
            assert report["orders"][str(a)]["z"] == r.z
        assert report["adaptive"]["z"] == direct.adaptive_z

    def test_moving_average_dataset_rejects(self, tmp_path):
        data = tmp_path / "ma.csv"
        assert main(["simulate", "--model", "vma1", "--coeff", "identity", "--p", "100",
                     "--T", "400", "--seed", "3", "--output", str(data)]) == 0
        out = tmp_path / "r.json"
        assert main(["test", "--input", str(data), "--output", str(out)]) == 0
        adaptive = read_report(out)["adaptive"]
        assert adaptive["reject"] is True and adaptive["p_value"] < 1e-4

    def test_study(self, tmp_path, capsys):
        cfg = tmp_path / "spec.json"
        cfg.write_text(json.dumps(dict(study="size", model="null", ratios=[0.5], Ts=[30],
                                       nreps=20, master_seed=1)))
        assert main(["study", "--config", str(cfg), "--output-dir", str(tmp_path / "o"),
                     "--quiet"]) == 0
        assert (tmp_path / "o" / "results.csv").read_text().startswith("scenario,")
        assert json.loads((tmp_path / "o" / "results.json").read_text())["spec"]["nreps"] == 20

    def test_study_bad_config_exit_1(self, tmp_path):
        cfg = tmp_path / "spec.json"
        cfg.write_text(json.dumps(dict(study="size", model="var1")))
        assert main(["study", "--config", str(cfg), "--output-dir", str(tmp_path)]) == 1

    def test_verify(self, capsys):
        assert main(["verify"]) == 0
        assert "count_identity: ok" in capsys.readouterr().out

    def test_verify_detects_mismatch(self, monkeypatch):
        from hdwhite import verify

        monkeypatch.setattr(verify, "dp_tuple_product_sum", lambda s, q, a: float(np.sum(s)))
        assert main(["verify"]) == 1
