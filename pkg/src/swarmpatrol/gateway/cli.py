"""Command-line entry points: run, serve, replay, calibrate-workload."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from swarmpatrol.gateway.metrics import metrics_csv
from swarmpatrol.gateway.runtime import replay as replay_log
from swarmpatrol.gateway.runtime import run_headless
from swarmpatrol.gateway.scenario import ScenarioError, load_scenario
from swarmpatrol.workload import WorkloadParams, calibrate_agreement


@click.group()
def main() -> None:
    """Swarm patrol mission gateway."""


def _load(scenario_path: str):
    try:
        return load_scenario(scenario_path)
    except ScenarioError as exc:
        raise click.ClickException(str(exc)) from None


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--ticks", required=True, type=int)
@click.option("--log", "log_path", type=click.Path(), help="write the mission log (JSON lines)")
@click.option("--metrics", "metrics_path", type=click.Path(), help="write the metrics CSV")
def run(scenario_path: str, seed: int, ticks: int, log_path: str | None, metrics_path: str | None):
    """Run a scenario headless and report coverage plus the log digest."""
    scenario = _load(scenario_path)
    result = run_headless(scenario, seed, ticks)
    if log_path:
        Path(log_path).write_text("\n".join(result.log_lines) + "\n", encoding="utf-8")
    if metrics_path:
        Path(metrics_path).write_text(metrics_csv(result.metrics), encoding="utf-8")
    coverage = result.metrics.coverage()
    alarms = len(result.runtime.world.alarms)
    click.echo(f"scenario   {scenario.name}")
    click.echo(f"ticks      {ticks}")
    click.echo(f"alarms     {alarms}")
    click.echo(f"mean revisit interval  {coverage.mean_revisit:.1f} ticks")
    click.echo(f"max revisit interval   {coverage.max_revisit:.0f} ticks")
    click.echo(f"log digest {result.log_digest}")


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--speed", default=1.0, show_default=True, type=float,
              help="wall-clock speedup; 1.0 is real time at one tick per second")
def serve(scenario_path: str, seed: int, port: int, speed: float):
    """Serve a live mission for one operator console over WebSocket."""
    import uvicorn

    from swarmpatrol.gateway.server import create_app

    scenario = _load(scenario_path)
    app = create_app(scenario, seed, speed=speed)
    click.echo(f"serving {scenario.name} on ws://127.0.0.1:{port}/ws (speed x{speed})")
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
def replay(log_path: str, scenario_path: str):
    """Re-execute a mission log and verify it reproduces exactly."""
    scenario = _load(scenario_path)
    lines = Path(log_path).read_text(encoding="utf-8").splitlines()
    try:
        report = replay_log(lines, scenario)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    if report.ok and not report.partial:
        click.echo(f"replay ok: {report.checked_lines} log lines reproduced")
    elif report.ok:
        click.echo(f"replay ok (partial): {report.checked_lines} lines reproduced, log truncated")
    else:
        click.echo(
            f"divergence at line {report.divergence_line}"
            + (f" (tick {report.divergence_tick})" if report.divergence_tick is not None else "")
            + f": {report.detail}"
        )
        sys.exit(1)


@main.command(name="calibrate-workload")
@click.option("--params", "params_path", type=click.Path(exists=True),
              help="JSON file with workload parameter overrides")
def calibrate_workload(params_path: str | None):
    """Check that both workload estimators agree on the canonical scenarios."""
    kwargs = {}
    if params_path:
        kwargs = json.loads(Path(params_path).read_text(encoding="utf-8"))
        if "thresholds" in kwargs:
            kwargs["thresholds"] = tuple(kwargs["thresholds"])
    try:
        params = WorkloadParams(**kwargs)
    except (TypeError, ValueError) as exc:
        raise click.ClickException(f"invalid workload parameters: {exc}") from None
    report = calibrate_agreement(params)
    for case in report.cases:
        marker = "ok " if case.agree else "DISAGREE"
        click.echo(
            f"{marker} {case.scenario:12s} windowed={case.windowed_level} "
            f"continuous={case.continuous_level}"
        )
    if not report.all_agree:
        sys.exit(1)
    click.echo("all canonical scenarios agree")


if __name__ == "__main__":
    main()
