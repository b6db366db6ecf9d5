"""Command-line entry point: runs, validation, metric recomputation and
exit codes."""

import json
from pathlib import Path

import pytest

from dolenet.cli import main
from dolenet.params import scenario_config, write_config


def test_smoke_run_produces_csvs_and_manifest(tmp_path):
    out = tmp_path / "out"
    code = main(["run", "--scenario", "baseline", "--seed", "42",
                 "--replicates", "2", "--steps", "200", "--out", str(out)])
    assert code == 0
    scen = out / "baseline"
    assert (scen / "timeseries.csv").exists()
    assert (scen / "aggregated.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "complete"
    assert manifest["master_seed"] == 42
    assert manifest["scenarios"]["baseline"]["replicates"] == 2


def test_all_scenarios_in_manifest(tmp_path):
    out = tmp_path / "out"
    code = main(["run", "--scenario", "all", "--seed", "1",
                 "--replicates", "1", "--steps", "60", "--burn-in", "10",
                 "--out", str(out)])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    grid = {name: (meta["delta_g"], meta["epsilon"])
            for name, meta in manifest["scenarios"].items()}
    assert grid == {
        "baseline": (0.52, 360), "high": (0.69, 360), "low": (0.35, 360),
        "long": (0.52, 540), "short": (0.52, 180),
        "high-long": (0.69, 540), "high-short": (0.69, 180),
        "low-long": (0.35, 540), "low-short": (0.35, 180)}
    for name in grid:
        assert (out / name / "aggregated.csv").exists()


def test_unknown_scenario_exit_2(capsys, tmp_path):
    code = main(["run", "--scenario", "bogus", "--out", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "baseline" in err and "low-short" in err


def test_rerun_flagged_as_reproduction(tmp_path):
    out = tmp_path / "out"
    args = ["run", "--scenario", "short", "--seed", "3", "--replicates",
            "1", "--steps", "50", "--burn-in", "5", "--out", str(out)]
    assert main(args) == 0
    assert main(args) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest.get("reproduction") is True


def test_validate_good_config(tmp_path, capsys):
    path = tmp_path / "good.cfg"
    write_config(scenario_config("baseline"), path)
    assert main(["validate", "--config", str(path)]) == 0
    assert "config ok" in capsys.readouterr().out


def test_validate_bad_replacement_rate(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    write_config(scenario_config("baseline"), path)
    text = path.read_text().replace("delta_g = 0.52", "delta_g = 1.5")
    path.write_text(text)
    assert main(["validate", "--config", str(path)]) == 2
    assert "(0, 1)" in capsys.readouterr().err


def test_metrics_recompute_matches_run(tmp_path):
    out = tmp_path / "out"
    main(["run", "--scenario", "baseline", "--seed", "5", "--replicates",
          "2", "--steps", "120", "--burn-in", "20", "--out", str(out)])
    agg_path = out / "baseline" / "aggregated.csv"
    original = agg_path.read_text()
    agg_path.unlink()
    assert main(["metrics", "--in", str(out), "--burn-in", "20"]) == 0
    assert agg_path.read_text() == original


def test_metrics_without_inputs_exit_2(tmp_path):
    assert main(["metrics", "--in", str(tmp_path)]) == 2


def test_events_export(tmp_path):
    out = tmp_path / "out"
    main(["run", "--scenario", "baseline", "--seed", "0", "--replicates",
          "1", "--steps", "150", "--burn-in", "10", "--out", str(out),
          "--events"])
    events = (out / "baseline" / "events.csv").read_text().splitlines()
    assert events[0] == "step,kind,household,firm"
