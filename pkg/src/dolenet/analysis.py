"""Metric computation, burn-in handling, trend-cycle decomposition and
cross-replicate aggregation.

Per-step metrics are pure functions of the simulation state and the event
log, so they can be recomputed offline from the exported CSVs. Aggregation
drops the burn-in, takes cross-replicate means and interdecile bands per
step, and smooths the mean paths with the standard trend-cycle filter for
quarterly data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solveh_banded

from .behavior import TYPE_C, TYPE_O, TYPE_SE, TYPE_ST
from .labour_market import normalized_mean_spell

METRICS = (
    "unemployment_rate",
    "unemployment_spell_norm",
    "employment_spell_norm",
    "turnover",
    "retention",
    "satisfaction_mean",
    "satisfaction_o",
    "satisfaction_c",
    "satisfaction_se",
    "satisfaction_st",
    "match_quality_mean",
    "match_quality_o",
    "match_quality_c",
    "match_quality_se",
    "match_quality_st",
    "monitoring_mean",
    "pfp_mean",
    "gdp_real",
    "consumption_real",
    "labour_demand",
)
N_METRICS = len(METRICS)
_METRIC_INDEX = {name: i for i, name in enumerate(METRICS)}


def hp_filter(series, lam: float = 1600.0):
    """Trend-cycle decomposition by penalized least squares.

    The trend minimizes the squared distance to the series plus ``lam``
    times the squared second differences of the trend; the cycle is the
    remainder. Solved through the symmetric pentadiagonal system with a
    banded Cholesky factorization.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ValueError("series must be one-dimensional")
    n = len(y)
    if n < 4:
        raise ValueError(f"series too short for trend extraction: {n} < 4")
    if lam <= 0:
        raise ValueError("smoothing parameter must be positive")

    main = np.full(n, 6.0)
    main[[0, -1]] = 1.0
    main[[1, -2]] = 5.0
    off1 = np.full(n - 1, -4.0)
    off1[[0, -1]] = -2.0
    off2 = np.full(n - 2, 1.0)

    ab = np.zeros((3, n))
    ab[0] = 1.0 + lam * main
    ab[1, :-1] = lam * off1
    ab[2, :-2] = lam * off2
    trend = solveh_banded(ab, y, lower=True)
    return trend, y - trend


def compute_step_metrics(state) -> np.ndarray:
    """One row of the time-series frame from the post-step state."""
    hh = state.hh
    n_hh = len(hh.vtype)
    unemployed = hh.employer < 0
    n_unemp = int(unemployed.sum())
    n_emp = n_hh - n_unemp

    row = np.empty(N_METRICS)
    row[0] = n_unemp / n_hh
    row[1] = normalized_mean_spell(hh.u_spell, unemployed, state.t)
    row[2] = normalized_mean_spell(hh.e_spell, ~unemployed, state.t)
    separations = state.fires_step + state.quits_step
    row[3] = separations / n_emp if n_emp else 0.0
    row[4] = 1.0 - row[3]
    row[5] = float(hh.satisfaction.mean())
    for k, vt in enumerate((TYPE_O, TYPE_C, TYPE_SE, TYPE_ST)):
        mask = hh.vtype == vt
        row[6 + k] = float(hh.satisfaction[mask].mean()) if mask.any() else 0.0
    row[10] = float(hh.base_sat.mean())
    for k, vt in enumerate((TYPE_O, TYPE_C, TYPE_SE, TYPE_ST)):
        mask = hh.vtype == vt
        row[11 + k] = float(hh.base_sat[mask].mean()) if mask.any() else 0.0
    row[15] = float(state.fm.monitoring.mean())
    row[16] = float(state.fm.reward_mix.mean())
    row[17] = float(state.fm.y.sum())
    row[18] = state.last_totals["consumption_real"] if hasattr(
        state, "last_totals") else 0.0
    row[19] = float(state.fm.n_demand.sum())
    return row


@dataclass
class AggregatedSeries:
    """Cross-replicate summary of one scenario."""

    steps: np.ndarray                 # step indices after burn-in
    metrics: tuple[str, ...]
    mean: np.ndarray                  # (n_steps, n_metrics)
    p10: np.ndarray
    p90: np.ndarray
    trend: np.ndarray
    cycle: np.ndarray


def aggregate(frames: list[np.ndarray], burn_in: int,
              hp_lambda: float = 1600.0) -> AggregatedSeries:
    """Drop the burn-in, average across replicates, band and detrend.

    ``frames`` holds one (steps, n_metrics) array per replicate; steps are
    1-based. The mean path of each metric is decomposed into trend and
    cycle; interdecile bands describe cross-replicate spread per step.
    """
    if not frames:
        raise ValueError("no replicate frames to aggregate")
    stack = np.stack(frames)                       # (reps, steps, metrics)
    n_steps = stack.shape[1]
    keep = np.arange(burn_in, n_steps)
    stack = stack[:, keep, :]
    # Reduce along a sorted axis so results are bit-identical under any
    # permutation of the replicates.
    stack = np.sort(stack, axis=0)
    mean = stack.mean(axis=0)
    p10 = np.percentile(stack, 10, axis=0)
    p90 = np.percentile(stack, 90, axis=0)
    trend = np.empty_like(mean)
    cycle = np.empty_like(mean)
    for j in range(mean.shape[1]):
        trend[:, j], cycle[:, j] = hp_filter(mean[:, j], hp_lambda)
    return AggregatedSeries(steps=keep + 1, metrics=METRICS, mean=mean,
                            p10=p10, p90=p90, trend=trend, cycle=cycle)


def write_long_csv(path: str | Path, frames: list[np.ndarray]) -> None:
    """Long-format export: one row per (step, replicate, metric)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "replicate", "metric", "value"])
        for r, frame in enumerate(frames):
            for i in range(frame.shape[0]):
                row = frame[i]
                for j, name in enumerate(METRICS):
                    writer.writerow([i + 1, r, name, repr(float(row[j]))])


def read_long_csv(path: str | Path) -> list[np.ndarray]:
    """Rebuild per-replicate frames from a long-format export."""
    by_rep: dict[int, dict[tuple[int, int], float]] = {}
    max_step = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["step", "replicate", "metric", "value"]:
            raise ValueError(f"unexpected header in {path}: {header}")
        for step_s, rep_s, metric, value in reader:
            t, r = int(step_s), int(rep_s)
            max_step = max(max_step, t)
            by_rep.setdefault(r, {})[(t, _METRIC_INDEX[metric])] = float(value)
    frames = []
    for r in sorted(by_rep):
        frame = np.zeros((max_step, N_METRICS))
        for (t, j), v in by_rep[r].items():
            frame[t - 1, j] = v
        frames.append(frame)
    return frames


def write_aggregated_csv(path: str | Path, series: AggregatedSeries) -> None:
    """Aggregated export: (step, metric, mean, p10, p90, trend, cycle)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "metric", "mean", "p10", "p90",
                         "trend", "cycle"])
        for i, t in enumerate(series.steps):
            for j, name in enumerate(series.metrics):
                writer.writerow([
                    int(t), name, repr(float(series.mean[i, j])),
                    repr(float(series.p10[i, j])),
                    repr(float(series.p90[i, j])),
                    repr(float(series.trend[i, j])),
                    repr(float(series.cycle[i, j]))])
