import json
import math

import numpy as np
import pytest

from heavytail import cli
from heavytail.core.config import PINNED_SEED
from heavytail.core.errors import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, QuadratureNonconvergenceError
from heavytail.services import verification


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# manifest ")
    manifest = json.loads(lines[0][len("# manifest "):])
    header = lines[1].split(",")
    rows = [[float(value) for value in line.split(",")] for line in lines[2:]]
    return manifest, header, np.array(rows)


class TestParsers:
    def test_grid(self):
        np.testing.assert_allclose(cli.parse_grid("-5:5:101"), np.linspace(-5, 5, 101))

    @pytest.mark.parametrize("text", ["1:2", "a:b:c", "0:1:0", "2:1:5"])
    def test_grid_rejects(self, text):
        with pytest.raises(cli.UsageError):
            cli.parse_grid(text)

    def test_theta_grid_inclusive(self):
        grid = cli.parse_theta_grid("-0.9:0.9:0.1")
        assert len(grid) == 19
        assert grid[9] == 0.0
        assert grid[0] == -0.9 and grid[-1] == 0.9

    def test_values(self):
        assert cli.parse_values("100,1e3") == [100.0, 1000.0]
        with pytest.raises(cli.UsageError):
            cli.parse_values("")


class TestSample:
    ARGS = ["sample", "--transform", "pm", "--theta", "0.5", "--weights", "0.3,0.7", "--n", "1000", "--seed", "7"]

    def test_writes_reproducible_csv(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(self.ARGS + ["--out", str(first)]) == EXIT_OK
        assert cli.main(self.ARGS + ["--out", str(second)]) == EXIT_OK

        manifest, header, rows = read_csv(first)
        assert header == ["index", "value"]
        assert rows.shape == (1000, 2)
        assert manifest["seed"] == 7
        assert manifest["parameters"]["weights"] == "0.3,0.7"
        assert first.read_text().splitlines()[1:] == second.read_text().splitlines()[1:]

    def test_rerun_from_manifest(self, tmp_path):
        out = tmp_path / "a.csv"
        cli.main(self.ARGS + ["--out", str(out)])
        manifest, _, rows = read_csv(out)
        params = manifest["parameters"]
        again = tmp_path / "b.csv"
        cli.main([
            "sample", "--transform", params["transform"], "--theta", str(params["theta"]),
            "--weights", params["weights"], "--n", str(params["n"]), "--seed", str(manifest["seed"]),
            "--out", str(again),
        ])
        np.testing.assert_array_equal(read_csv(again)[2], rows)

    def test_theta_out_of_range(self, tmp_path):
        args = ["sample", "--transform", "pm", "--theta", "1.5", "--weights", "0.5,0.5", "--n", "10"]
        assert cli.main(args + ["--out", str(tmp_path / "x.csv")]) == EXIT_USAGE

    def test_theta_and_cov_exclusive(self, tmp_path):
        cov = tmp_path / "cov.txt"
        cov.write_text("1 0\n0 1\n")
        args = ["sample", "--transform", "abs", "--theta", "0.5", "--cov", str(cov), "--weights", "0.5,0.5", "--n", "10"]
        assert cli.main(args) == EXIT_USAGE

    def test_covariance_file(self, tmp_path):
        cov = tmp_path / "cov.txt"
        cov.write_text("2 0.5 0\n0.5 1 0\n0 0 3\n")
        out = tmp_path / "x.csv"
        args = ["sample", "--transform", "bm", "--cov", str(cov), "--weights", "0.2,0.3,0.5", "--n", "100", "--out", str(out)]
        assert cli.main(args) == EXIT_OK
        manifest, _, rows = read_csv(out)
        assert rows.shape == (100, 2)
        assert manifest["parameters"]["covariance"][0][0] == pytest.approx(2.0)

    def test_singular_covariance_is_numerical(self, tmp_path):
        cov = tmp_path / "cov.txt"
        cov.write_text("1 1\n1 1\n")
        args = ["sample", "--transform", "abs", "--cov", str(cov), "--weights", "0.5,0.5", "--n", "10"]
        assert cli.main(args + ["--out", str(tmp_path / "x.csv")]) == EXIT_NUMERICAL

    def test_missing_covariance_file(self, tmp_path):
        args = ["sample", "--transform", "abs", "--cov", str(tmp_path / "nope"), "--weights", "0.5,0.5", "--n", "10"]
        assert cli.main(args) == EXIT_USAGE

    def test_mixture_method(self, tmp_path):
        out = tmp_path / "x.csv"
        args = ["sample", "--transform", "bm", "--method", "mixture", "--theta", "0.5", "--weights", "0.5,0.5",
                "--n", "500", "--out", str(out)]
        assert cli.main(args) == EXIT_OK
        assert read_csv(out)[2].shape == (500, 2)

    def test_mixture_needs_bm(self):
        args = ["sample", "--transform", "abs", "--method", "mixture", "--theta", "0.5", "--weights", "0.5,0.5", "--n", "10"]
        assert cli.main(args) == EXIT_USAGE

    def test_seed_from_environment(self, monkeypatch):
        from heavytail.core.config import Settings
        monkeypatch.setenv("HEAVYTAIL_SEED", "99")
        assert Settings().SEED == 99

    def test_unknown_transform(self):
        assert cli.main(["sample", "--transform", "xx", "--theta", "0", "--weights", "1", "--n", "1"]) == EXIT_USAGE


class TestDensity:
    def test_matches_cauchy_when_independent(self, tmp_path):
        out = tmp_path / "g.csv"
        assert cli.main(["density", "--transform", "abs", "--theta", "0", "--weights", "0.5,0.5",
                         "--grid=-5:5:101", "--out", str(out)]) == EXIT_OK
        _, header, rows = read_csv(out)
        assert header == ["v", "g_v", "err_est"]
        assert rows.shape == (101, 3)
        np.testing.assert_allclose(rows[:, 1], 1 / (math.pi * (1 + rows[:, 0] ** 2)), atol=1e-8)

    def test_single_point_excess(self, tmp_path):
        out = tmp_path / "g.csv"
        assert cli.main(["density", "--transform", "abs", "--theta", "0.1", "--weights", "0.5,0.5",
                         "--grid", "0:0:1", "--out", str(out)]) == EXIT_OK
        rows = read_csv(out)[2]
        assert rows.shape == (1, 3)
        assert rows[0, 1] > 1 / math.pi

    def test_malformed_grid(self):
        assert cli.main(["density", "--transform", "bm", "--theta", "0", "--weights", "0.5,0.5", "--grid", "0:1"]) == EXIT_USAGE

    def test_pm_has_no_density(self):
        assert cli.main(["density", "--transform", "pm", "--theta", "0", "--weights", "0.5,0.5", "--grid", "0:1:2"]) == EXIT_USAGE

    def test_nonconvergence_exits_numerical(self, tmp_path, monkeypatch):
        def fail(model, v, cfg=None):
            raise QuadratureNonconvergenceError("roundoff detected", 0.3, 1e-3)

        monkeypatch.setattr(cli.density, "evaluate_density", fail)
        args = ["density", "--transform", "abs", "--theta", "0.5", "--weights", "0.5,0.5", "--grid", "0:1:3",
                "--out", str(tmp_path / "g.csv")]
        assert cli.main(args) == EXIT_NUMERICAL


class TestTail:
    def test_independent_closed_form(self, tmp_path):
        out = tmp_path / "t.csv"
        assert cli.main(["tail", "--transform", "bm", "--theta", "0", "--weights", "0.5,0.5",
                         "--v-values", "100,1000,10000", "--out", str(out)]) == EXIT_OK
        _, header, rows = read_csv(out)
        assert header == ["v", "v2_gv"]
        v = rows[:, 0]
        np.testing.assert_allclose(rows[:, 1], v * v / (math.pi * (1 + v * v)), atol=1e-8)

    def test_approaches_limit(self, tmp_path):
        out = tmp_path / "t.csv"
        cli.main(["tail", "--transform", "abs", "--theta", "0.5", "--weights", "0.3,0.7",
                  "--v-values", "100,1000,10000", "--out", str(out)])
        gaps = np.abs(read_csv(out)[2][:, 1] - 1 / math.pi)
        assert gaps[-1] < 1e-3
        assert gaps[-1] < gaps[0]

    def test_empty_list(self):
        assert cli.main(["tail", "--transform", "abs", "--theta", "0.5", "--weights", "0.5,0.5", "--v-values", ""]) == EXIT_USAGE

    def test_nonpositive_v(self):
        assert cli.main(["tail", "--transform", "abs", "--theta", "0.5", "--weights", "0.5,0.5", "--v-values", "0"]) == EXIT_USAGE


class TestDerivative:
    @pytest.mark.parametrize("transform, expected", [("abs", 0.125), ("bm", 1 / (4 * math.pi))])
    def test_values(self, transform, expected, tmp_path):
        out = tmp_path / "d.json"
        assert cli.main(["derivative", "--transform", transform, "--weights", "0.5,0.5", "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["quadrature_value"] == pytest.approx(expected, abs=1e-8)
        assert payload["finite_difference_value"] == pytest.approx(expected, abs=1e-5)
        assert payload["h"] == 1e-4
        assert payload["manifest"]["subcommand"] == "derivative"

    def test_degenerate_weights(self, tmp_path):
        out = tmp_path / "d.json"
        cli.main(["derivative", "--transform", "abs", "--weights", "1,0", "--out", str(out)])
        payload = json.loads(out.read_text())
        assert payload["quadrature_value"] == 0.0
        assert payload["finite_difference_value"] == pytest.approx(0.0, abs=1e-6)

    def test_bad_step(self):
        assert cli.main(["derivative", "--transform", "abs", "--weights", "0.5,0.5", "--h", "0.1"]) == EXIT_USAGE


class TestSweep:
    def test_abs_sweep(self, tmp_path, serial_workers):
        out = tmp_path / "s.json"
        assert cli.main(["sweep", "--transform", "abs", "--theta-grid=-0.9:0.9:0.1", "--weights", "0.5,0.5",
                         "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        results = payload["results"]
        assert len(results) == 19
        assert [r["model"]["theta"] for r in results] == cli.parse_theta_grid("-0.9:0.9:0.1")
        assert [r["model"]["theta"] for r in results if r["is_cauchy"]] == [0.0]
        assert payload["manifest"]["subcommand"] == "sweep"

    def test_pm_is_usage_error(self):
        assert cli.main(["sweep", "--transform", "pm", "--theta-grid", "0:0.5:0.1", "--weights", "0.5,0.5"]) == EXIT_USAGE

    def test_grid_leaving_domain(self):
        assert cli.main(["sweep", "--transform", "bm", "--theta-grid", "0:1:0.5", "--weights", "0.5,0.5"]) == EXIT_USAGE

    def test_help_describes_output(self, capsys):
        with pytest.raises(SystemExit):
            cli.build_parser().parse_args(["sweep", "--help"])
        text = capsys.readouterr().out
        assert '"manifest":' in text
        assert '"results":' in text


class TestVerify:
    def test_pass(self, tmp_path, monkeypatch):
        monkeypatch.setattr(verification, "CRITERIA", [("ok", lambda full: (True, {}))])
        out = tmp_path / "v.json"
        assert cli.main(["verify", "--suite", "quick", "--out", str(out)]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["passed"] is True
        assert report["manifest"]["seed"] == PINNED_SEED

    def test_failure_report(self, tmp_path, monkeypatch):
        monkeypatch.setattr(verification, "CRITERIA", [
            ("ok", lambda full: (True, {})),
            ("bad", lambda full: (False, {"max_z": 7.5})),
        ])
        out = tmp_path / "v.json"
        assert cli.main(["verify", "--suite", "full", "--out", str(out)]) == EXIT_VERIFICATION
        report = json.loads(out.read_text())
        assert report["passed"] is False
        assert [f["name"] for f in report["failures"]] == ["bad"]
        assert report["failures"][0]["details"] == {"max_z": 7.5}

    def test_unknown_suite(self):
        assert cli.main(["verify", "--suite", "nightly"]) == EXIT_USAGE


class TestConfig:
    def test_prints_settings(self, capsys):
        assert cli.main(["config"]) == EXIT_OK
        settings = json.loads(capsys.readouterr().out)
        assert settings["BATCH_SIZE"] > 0
        assert "SEED" in settings

    def test_workers_flag(self, monkeypatch):
        from heavytail.core.config import settings
        monkeypatch.setattr(settings, "WORKERS", settings.WORKERS)
        assert cli.main(["--workers", "2", "config"]) == EXIT_OK
        assert settings.WORKERS == 2

    def test_missing_subcommand(self):
        assert cli.main([]) == EXIT_USAGE
