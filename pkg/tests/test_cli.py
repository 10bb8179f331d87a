import csv
import json
import logging

import pytest
from click.testing import CliRunner

from src.cli.exceptions import ConfigException
from src.cli.service import read_cutoffs, select_models
from src.main import cli

VEMURAFENIB = {
    "labels": ["NSCLC", "CRC-V", "CRC-VC", "CCA", "ECD/LCH", "ATC"],
    "n": [19, 10, 26, 8, 14, 7],
    "x": [8, 0, 1, 1, 6, 2],
}
SHORT_MCMC = {"burn_in": 200, "post_burn_iterations": 400, "thin": 1}


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    for name in (None, "src"):
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def write_config(path, payload) -> str:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def analyze_config(tmp_path, models, **extra):
    payload = {"data": VEMURAFENIB, "pi_h0": 0.15, "pi_h1": 0.35, "M": 84, "models": models, **extra}
    return write_config(tmp_path / "analyze.json", payload)


class TestAnalyze:

    def test_no_borrowing_table(self, runner, tmp_path):
        config = analyze_config(tmp_path, [{"kind": "BBM-NB"}])
        out = tmp_path / "out"
        result = runner.invoke(cli, ["analyze", "--config", config, "--out", str(out)])
        assert result.exit_code == 0, result.output
        rows = read_rows(out / "posterior.csv")
        assert rows[0] == ["type", "n", "x", "BBM-NB mean", "BBM-NB lower", "BBM-NB upper", "BBM-NB PP"]
        assert rows[1] == ["NSCLC", "19", "8", "42.9", "23.1", "63.9", "99.9"]
        assert rows[2][3] == "8.3"
        assert (out / "manifest.json").exists()
        assert (out / "ess.csv").exists()

    def test_two_models_side_by_side(self, runner, tmp_path):
        config = analyze_config(tmp_path, [{"kind": "BBM-NB"}, {"kind": "BUPD-JS"}])
        out = tmp_path / "out"
        result = runner.invoke(cli, ["analyze", "--config", config, "--out", str(out)])
        assert result.exit_code == 0, result.output
        header = read_rows(out / "posterior.csv")[0]
        assert header[3:] == [
            "BBM-NB mean", "BBM-NB lower", "BBM-NB upper", "BBM-NB PP",
            "BUPD-JS mean", "BUPD-JS lower", "BUPD-JS upper", "BUPD-JS PP",
        ]
        mw = read_rows(out / "mw_BUPD-JS.csv")
        assert mw[0] == ["type", "CRC-V", "CRC-VC", "CCA", "ECD/LCH", "ATC"]
        assert abs(float(mw[1][4]) - 9.0) <= 0.2
        summaries = json.loads((out / "results.json").read_text())["summaries"]
        assert [s["model"] for s in summaries] == ["BBM-NB", "BUPD-JS"]
        assert summaries[1]["m_mean"] == 84.0

    def test_model_selection_on_the_command_line(self, runner, tmp_path):
        config = analyze_config(tmp_path, [{"kind": "BBM-NB"}, {"kind": "BUPD-JS"}])
        out = tmp_path / "out"
        result = runner.invoke(cli, ["analyze", "--config", config, "--model", "BUPD-JS", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert read_rows(out / "posterior.csv")[0][3] == "BUPD-JS mean"

    def test_missing_field_is_a_validation_error(self, runner, tmp_path):
        payload = {"data": {"n": [19, 10]}, "models": [{"kind": "BBM-NB"}]}
        config = write_config(tmp_path / "bad.json", payload)
        result = runner.invoke(cli, ["analyze", "--config", config, "--out", str(tmp_path / "out")])
        assert result.exit_code == 2
        assert "data.x" in result.output

    def test_unknown_model(self, runner, tmp_path):
        config = analyze_config(tmp_path, [{"kind": "EXNEX"}])
        result = runner.invoke(cli, ["analyze", "--config", config, "--out", str(tmp_path / "out")])
        assert result.exit_code == 2

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["analyze", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
        assert result.exit_code == 2
        assert "file not found" in result.output

    def test_seeded_sampler_output_is_reproducible(self, runner, tmp_path):
        config = analyze_config(tmp_path, [{"kind": "BUPD-D"}], mcmc=SHORT_MCMC)
        outputs = []
        for k, seed in enumerate(("7", "7", "8")):
            out = tmp_path / f"out{k}"
            result = runner.invoke(cli, ["analyze", "--config", config, "--seed", seed, "--out", str(out)])
            assert result.exit_code == 0, result.output
            outputs.append((out / "posterior.csv").read_bytes())
        assert outputs[0] == outputs[1]
        assert outputs[0] != outputs[2]

    def test_numerical_failure_exit_code(self, runner, tmp_path):
        mcmc = {**SHORT_MCMC, "acceptance_bounds": [0.99, 1.0]}
        config = analyze_config(tmp_path, [{"kind": "BUPD-D"}], mcmc=mcmc)
        result = runner.invoke(cli, ["analyze", "--config", config, "--out", str(tmp_path / "out")])
        assert result.exit_code == 3
        assert "BUPD-D" in result.output


class TestCalibrate:

    def test_too_few_replicates(self, runner, tmp_path):
        config = write_config(tmp_path / "cal.json", {"models": [{"kind": "BBM-NB"}], "plan": {"workers": 1}})
        result = runner.invoke(cli, ["calibrate", "--config", config, "--reps", "10", "--out", str(tmp_path / "out")])
        assert result.exit_code == 2

    def test_bundle(self, runner, tmp_path):
        payload = {"models": [{"kind": "BBM-NB"}], "plan": {"workers": 1}, "verify": False}
        config = write_config(tmp_path / "cal.json", payload)
        out = tmp_path / "out"
        result = runner.invoke(cli, ["calibrate", "--config", config, "--reps", "100", "--out", str(out)])
        assert result.exit_code == 0, result.output
        cutoffs = json.loads((out / "cutoffs.json").read_text())["cutoffs"]
        assert 0.0 <= cutoffs["BBM-NB"] <= 1.0
        rows = read_rows(out / "calibration.csv")
        assert rows[1][0] == "BBM-NB"
        assert read_cutoffs(out / "calibration.json") == cutoffs


class TestSimulate:

    def simulate_config(self, tmp_path, **overrides):
        payload = {
            "scenarios": ["scenario1", "scenario4"],
            "models": [{"kind": "BBM-NB"}],
            "plan": {"replicates": 20, "workers": 1},
            **overrides,
        }
        return write_config(tmp_path / "sim.json", payload)

    def test_empty_scenario_list(self, runner, tmp_path):
        config = self.simulate_config(tmp_path, scenarios=[])
        result = runner.invoke(cli, ["simulate", "--config", config, "--out", str(tmp_path / "out")])
        assert result.exit_code == 2

    def test_cutoffs_file(self, runner, tmp_path):
        cutoffs = write_config(tmp_path / "cutoffs.json", {"cutoffs": {"BBM-NB": 0.9}})
        out = tmp_path / "out"
        result = runner.invoke(cli, ["simulate", "--config", self.simulate_config(tmp_path),
                                     "--cutoffs", cutoffs, "--out", str(out)])
        assert result.exit_code == 0, result.output
        results = json.loads((out / "results.json").read_text())
        assert results["cutoffs"] == {"BBM-NB": 0.9}
        assert results["calibrations"] == []
        oc = read_rows(out / "oc.csv")
        assert len(oc) == 1 + 2 * 6
        assert oc[1][:3] == ["scenario1", "BBM-NB", "1"]
        summary = read_rows(out / "summary.csv")
        assert [row[0] for row in summary[1:]] == ["scenario1", "scenario4"]

    def test_partial_failure(self, runner, tmp_path):
        mcmc = {"burn_in": 0, "post_burn_iterations": 20, "thin": 1, "acceptance_bounds": [0.99, 1.0]}
        config = self.simulate_config(
            tmp_path,
            scenarios=["scenario2"],
            models=[{"kind": "BUPD-D"}, {"kind": "BBM-NB"}],
            plan={"replicates": 3, "workers": 1, "mcmc": mcmc},
            cutoffs={"BUPD-D": 0.9, "BBM-NB": 0.9},
        )
        out = tmp_path / "out"
        result = runner.invoke(cli, ["simulate", "--config", config, "--out", str(out)])
        assert result.exit_code == 4
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["exit_code"] == 4
        assert [f["model"] for f in manifest["failures"]] == ["BUPD-D"]
        assert len(read_rows(out / "oc.csv")) == 1 + 6


class TestRerun:

    def test_rerun_is_byte_identical(self, runner, tmp_path):
        config = analyze_config(tmp_path, [{"kind": "BBM-JS"}, {"kind": "BUPD-JSH"}], mcmc=SHORT_MCMC)
        first, second = tmp_path / "first", tmp_path / "second"
        assert runner.invoke(cli, ["analyze", "--config", config, "--out", str(first)]).exit_code == 0
        result = runner.invoke(cli, ["rerun", "--manifest", str(first / "manifest.json"), "--out", str(second)])
        assert result.exit_code == 0, result.output
        for name in ("results.json", "posterior.csv", "ess.csv", "mw_BUPD-JSH.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_bad_manifest(self, runner, tmp_path):
        manifest = write_config(tmp_path / "manifest.json", {"command": "dance"})
        result = runner.invoke(cli, ["rerun", "--manifest", manifest, "--out", str(tmp_path / "out")])
        assert result.exit_code == 2


class TestHelpers:

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "bupd-basket" in result.output

    @pytest.mark.parametrize("payload, expected", [
        ({"cutoffs": {"A": 0.9}}, {"A": 0.9}),
        ({"calibrations": [{"model": "A", "cutoff": 0.8}, {"model": "B", "cutoff": 0.7}]}, {"A": 0.8, "B": 0.7}),
        ({"model": "A", "cutoff": 0.95}, {"A": 0.95}),
    ])
    def test_read_cutoffs(self, tmp_path, payload, expected):
        path = tmp_path / "c.json"
        write_config(path, payload)
        assert read_cutoffs(path) == expected

    @pytest.mark.parametrize("payload", [[0.9], {"calibrations": [{"model": "A"}]}, {"cut": 1}])
    def test_read_cutoffs_rejects(self, tmp_path, payload):
        path = tmp_path / "c.json"
        write_config(path, payload)
        with pytest.raises(ConfigException):
            read_cutoffs(path)

    def test_select_models(self):
        configured = [{"kind": "BUPD-D", "label": "BUPD-D-18", "M": 18}, {"kind": "BBM-NB"}]
        assert select_models(configured, ["BUPD-D-18"]) == [configured[0]]
        assert select_models(configured, ["BHM"]) == [{"kind": "BHM"}]
        with pytest.raises(ConfigException):
            select_models(configured, ["EXNEX"])
