"""CLI surface: run, replay, calibrate-workload (serve is covered in test_server)."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from swarmpatrol.gateway.cli import main

from scenario_helpers import minimal_scenario, two_intruder_scenario


@pytest.fixture()
def runner():
    return CliRunner()


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


class TestRunCommand:
    def test_run_writes_log_and_metrics(self, runner, tmp_path):
        scenario = write_scenario(tmp_path, two_intruder_scenario())
        log_path = tmp_path / "mission.jsonl"
        csv_path = tmp_path / "metrics.csv"
        result = runner.invoke(main, [
            "run", "--scenario", scenario, "--seed", "3", "--ticks", "120",
            "--log", str(log_path), "--metrics", str(csv_path),
        ])
        assert result.exit_code == 0, result.output
        assert "log digest" in result.output
        lines = log_path.read_text().splitlines()
        assert json.loads(lines[0])["category"] == "init"
        header = csv_path.read_text().splitlines()[0]
        assert header.split(",")[:5] == [
            "kind", "tick", "continuous", "discrete_windowed", "discrete_continuous"]
        assert "coverage" in csv_path.read_text()

    def test_invalid_scenario_lists_fields(self, runner, tmp_path):
        doc = minimal_scenario()
        doc["surprise"] = 1
        scenario = write_scenario(tmp_path, doc)
        result = runner.invoke(main, ["run", "--scenario", scenario, "--ticks", "5"])
        assert result.exit_code != 0
        assert "surprise" in result.output


class TestReplayCommand:
    def test_replay_round_trip(self, runner, tmp_path):
        scenario = write_scenario(tmp_path, two_intruder_scenario())
        log_path = tmp_path / "mission.jsonl"
        run_result = runner.invoke(main, [
            "run", "--scenario", scenario, "--seed", "1", "--ticks", "80",
            "--log", str(log_path),
        ])
        assert run_result.exit_code == 0, run_result.output
        replay_result = runner.invoke(main, [
            "replay", "--log", str(log_path), "--scenario", scenario,
        ])
        assert replay_result.exit_code == 0, replay_result.output
        assert "replay ok" in replay_result.output

    def test_replay_flags_divergence(self, runner, tmp_path):
        scenario = write_scenario(tmp_path, two_intruder_scenario())
        log_path = tmp_path / "mission.jsonl"
        runner.invoke(main, [
            "run", "--scenario", scenario, "--seed", "1", "--ticks", "80",
            "--log", str(log_path),
        ])
        lines = log_path.read_text().splitlines()
        entry = json.loads(lines[40])
        entry["tick"] += 1
        lines[40] = json.dumps(entry, sort_keys=True, separators=(",", ":"))
        log_path.write_text("\n".join(lines) + "\n")
        result = runner.invoke(main, ["replay", "--log", str(log_path), "--scenario", scenario])
        assert result.exit_code == 1
        assert "divergence" in result.output


class TestCalibrateCommand:
    def test_defaults_agree(self, runner):
        result = runner.invoke(main, ["calibrate-workload"])
        assert result.exit_code == 0, result.output
        assert "all canonical scenarios agree" in result.output

    def test_bad_weights_disagree(self, runner, tmp_path):
        params = tmp_path / "params.json"
        params.write_text(json.dumps({"w_alarm": 1.0}))
        result = runner.invoke(main, ["calibrate-workload", "--params", str(params)])
        assert result.exit_code == 1
        assert "DISAGREE" in result.output

    def test_invalid_thresholds_rejected(self, runner, tmp_path):
        params = tmp_path / "params.json"
        params.write_text(json.dumps({"thresholds": [5.0, 2.0, 1.0]}))
        result = runner.invoke(main, ["calibrate-workload", "--params", str(params)])
        assert result.exit_code != 0
        assert "invalid workload parameters" in result.output
