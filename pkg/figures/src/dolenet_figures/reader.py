"""Read aggregated scenario CSVs (step, metric, mean, p10, p90, trend,
cycle) into per-metric arrays."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

COLUMNS = ("step", "metric", "mean", "p10", "p90", "trend", "cycle")


class DataError(ValueError):
    """The CSV input is missing, empty, or malformed."""


@dataclass
class ScenarioSeries:
    """One scenario's aggregated time series by metric name."""

    name: str
    steps: np.ndarray
    series: dict[str, dict[str, np.ndarray]]   # metric -> column -> values

    def column(self, metric: str, column: str = "trend") -> np.ndarray:
        if metric not in self.series:
            raise DataError(
                f"scenario {self.name!r} is missing metric column "
                f"{metric!r}")
        return self.series[metric][column]


def read_aggregated(path: str | Path, name: str) -> ScenarioSeries:
    """Parse one aggregated.csv; reject empty or malformed files."""
    path = Path(path)
    rows: dict[str, dict[str, list[float]]] = {}
    steps: dict[str, list[int]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        if tuple(header) != COLUMNS:
            raise DataError(f"{path} has unexpected header {header}")
        for raw in reader:
            step_s, metric, mean, p10, p90, trend, cycle = raw
            rows.setdefault(metric, {c: [] for c in COLUMNS[2:]})
            rows[metric]["mean"].append(float(mean))
            rows[metric]["p10"].append(float(p10))
            rows[metric]["p90"].append(float(p90))
            rows[metric]["trend"].append(float(trend))
            rows[metric]["cycle"].append(float(cycle))
            steps.setdefault(metric, []).append(int(step_s))
    if not rows:
        raise DataError(f"{path} contains a header but no data")
    first = next(iter(steps.values()))
    series = {metric: {c: np.asarray(v) for c, v in cols.items()}
              for metric, cols in rows.items()}
    return ScenarioSeries(name=name, steps=np.asarray(first), series=series)


def discover_scenarios(in_dir: str | Path) -> dict[str, ScenarioSeries]:
    """Load every <scenario>/aggregated.csv under a run directory."""
    in_dir = Path(in_dir)
    found = sorted(in_dir.glob("*/aggregated.csv"))
    if not found:
        raise DataError(f"no */aggregated.csv files under {in_dir}")
    return {p.parent.name: read_aggregated(p, p.parent.name) for p in found}
