import json

import numpy as np
import pytest
import yaml

from charbeta.cli import EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, main
from charbeta.core.harness import export_panel_csv
from charbeta.core.panel import IncrementPanel

pytestmark = pytest.mark.unit


@pytest.fixture
def simulated_csv(tmp_path, capsys):
    path = tmp_path / "sim.csv"
    code = main(["simulate", "--p", "40", "--n", "30", "--seed", "3", "--out", str(path)])
    assert code == EXIT_OK
    capsys.readouterr()
    return path


def _last_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


class TestVerbs:
    def test_simulate_reports_schema(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        assert main(["simulate", "--p", "20", "--n", "10", "--out", str(path)]) == EXIT_OK
        out = _last_json(capsys)
        assert out["n_factors"] == 1 and out["n_chars"] == 1
        assert path.exists()

    def test_simulate_from_config(self, tmp_path, capsys):
        config = tmp_path / "dgp.yaml"
        config.write_text(yaml.safe_dump({"p": 12, "n": 8, "K": 2, "seed": 1}))
        path = tmp_path / "s.csv"
        assert main(["simulate", "--config", str(config), "--out", str(path)]) == EXIT_OK
        assert _last_json(capsys)["n_factors"] == 2

    def test_ingest_check(self, simulated_csv, capsys):
        args = ["ingest-check", "--panel", str(simulated_csv), "--n-factors", "1"]
        assert main(args) == EXIT_OK
        out = _last_json(capsys)
        assert (out["p"], out["n"], out["factors"]) == (40, 30, 1)
        assert out["dropped_assets"] == []

    def test_estimate_writes_csv(self, simulated_csv, tmp_path, capsys):
        target = tmp_path / "g.csv"
        args = [
            "estimate", "--panel", str(simulated_csv), "--n-factors", "1",
            "--k-n", "20", "--out", str(target),
        ]
        assert main(args) == EXIT_OK
        assert _last_json(capsys)["k_n"] == 20
        assert np.loadtxt(target, delimiter=",").shape == (40,)

    def test_latent_estimate(self, simulated_csv, capsys):
        args = [
            "estimate", "--panel", str(simulated_csv), "--factor-mode", "latent",
            "--k-n", "20",
        ]
        assert main(args) == EXIT_OK
        assert _last_json(capsys)["K"] == 1

    @pytest.mark.parametrize("method", ["cs_bootstrap", "plugin_full", "integrated"])
    def test_ci(self, simulated_csv, capsys, method):
        args = [
            "ci", "--panel", str(simulated_csv), "--n-factors", "1", "--k-n", "20",
            "--method", method, "--B", "19", "--target", "2",
        ]
        assert main(args) == EXIT_OK
        out = _last_json(capsys)
        assert out["lo"] <= out["point"] <= out["hi"]

    def test_ci_is_reproducible(self, simulated_csv, capsys):
        args = [
            "ci", "--panel", str(simulated_csv), "--n-factors", "1", "--k-n", "20",
            "--B", "29", "--seed", "4",
        ]
        main(args)
        first = _last_json(capsys)
        main(args)
        assert _last_json(capsys) == first

    def test_coverage_writes_report(self, tmp_path, capsys):
        config = tmp_path / "exp.yaml"
        config.write_text(
            yaml.safe_dump(
                {
                    "name": "cli_smoke",
                    "dgp": {"p": 30, "n": 25},
                    "k_n": 20,
                    "trials": 2,
                    "B": 9,
                    "gamma_grid": ["zero"],
                    "methods": ["cs_bootstrap", "plugin_naive"],
                }
            )
        )
        out_dir = tmp_path / "report"
        args = ["coverage", "--config", str(config), "--out", str(out_dir)]
        assert main(args) == EXIT_OK
        assert "Coverage study: cli_smoke" in capsys.readouterr().out
        first = (out_dir / "cli_smoke.csv").read_bytes()
        assert (out_dir / "cli_smoke.jsonl").exists()
        assert main(args) == EXIT_OK
        assert (out_dir / "cli_smoke.csv").read_bytes() == first


class TestExitCodes:
    def test_missing_panel_is_data_error(self, tmp_path):
        assert main(["ingest-check", "--panel", str(tmp_path / "none.csv")]) == EXIT_DATA

    def test_schema_mismatch_is_data_error(self, simulated_csv):
        assert main(["ingest-check", "--panel", str(simulated_csv)]) == EXIT_DATA

    def test_bad_level_is_config_error(self, simulated_csv):
        args = [
            "ci", "--panel", str(simulated_csv), "--n-factors", "1", "--k-n", "20",
            "--level", "1.5",
        ]
        assert main(args) == EXIT_CONFIG

    def test_bad_experiment_is_config_error(self, tmp_path):
        config = tmp_path / "exp.yaml"
        config.write_text("trials: 0\n")
        assert main(["coverage", "--config", str(config)]) == EXIT_CONFIG

    def test_known_mode_without_factors_is_config_error(self, tmp_path, rng):
        path = tmp_path / "nof.csv"
        export_panel_csv(path, IncrementPanel(rng.standard_normal((10, 8)), 0.1), rng.standard_normal((10, 1)))
        args = ["estimate", "--panel", str(path), "--delta-n", "0.1"]
        assert main(args) == EXIT_CONFIG

    def test_degenerate_factor_is_numerical_error(self, tmp_path, rng):
        path = tmp_path / "flat.csv"
        panel = IncrementPanel(rng.standard_normal((10, 8)), 0.1)
        export_panel_csv(path, panel, rng.standard_normal((10, 1)), np.zeros((1, 8)))
        args = ["estimate", "--panel", str(path), "--n-factors", "1", "--delta-n", "0.1"]
        assert main(args) == EXIT_NUMERICAL
