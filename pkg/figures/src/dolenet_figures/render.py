"""Render the panel figures and expose their structure for golden tests.

With a single scenario directory the value-type panels fan out by worker
type and one expiry line is drawn; with several scenarios each panel
overlays one line per scenario, expiry lines are drawn at every distinct
benefit duration, and the baseline is emphasized throughout.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .reader import DataError, ScenarioSeries  # noqa: E402
from .specs import (BASELINE, FIGURES, SCENARIO_COLORS,  # noqa: E402
                    SCENARIO_EPSILON, VALUE_TYPE_METRICS, FigureSpec)

BOLD_LW = 2.4
THIN_LW = 1.1


def _epsilon_lines(ax, scenarios: dict[str, ScenarioSeries]) -> None:
    durations = sorted({SCENARIO_EPSILON[name] for name in scenarios
                        if name in SCENARIO_EPSILON})
    baseline_eps = SCENARIO_EPSILON.get(BASELINE)
    for eps in durations:
        bold = BASELINE in scenarios and eps == baseline_eps
        ax.axvline(eps, color="0.4", alpha=0.8,
                   linewidth=BOLD_LW if bold else THIN_LW,
                   linestyle="--", gid=f"epsilon-{eps}")


def build_figure(spec: FigureSpec,
                 scenarios: dict[str, ScenarioSeries],
                 column: str = "trend"):
    """One figure per spec: panels in a row, overlay across scenarios."""
    if not scenarios:
        raise DataError("no scenario data to plot")
    single = len(scenarios) == 1
    fig, axes = plt.subplots(1, len(spec.panels),
                             figsize=(4.6 * len(spec.panels), 3.6),
                             squeeze=False)
    for ax, panel in zip(axes[0], spec.panels):
        if single and panel.by_type:
            name, data = next(iter(scenarios.items()))
            metrics = VALUE_TYPE_METRICS[panel.by_type]
            for metric, label in zip(metrics, panel.labels):
                ax.plot(data.steps, data.column(metric, column),
                        linewidth=THIN_LW, label=label, gid=f"line-{metric}")
            ax.plot(data.steps, data.column(panel.metrics[0], column),
                    color="black", linewidth=BOLD_LW, label="all types",
                    gid=f"line-{panel.metrics[0]}")
        else:
            for name in sorted(scenarios):
                data = scenarios[name]
                for metric in panel.metrics:
                    ax.plot(data.steps, data.column(metric, column),
                            color=SCENARIO_COLORS.get(name),
                            linewidth=BOLD_LW if name == BASELINE
                            else THIN_LW,
                            label=name, gid=f"line-{name}-{metric}")
        _epsilon_lines(ax, scenarios)
        ax.set_title(panel.title)
        ax.set_xlabel("step")
    axes[0][0].legend(fontsize=7, loc="best")
    fig.tight_layout()
    return fig


def figure_structure(fig) -> dict:
    """Geometry summary for golden comparisons: axes, lines, expiry marks."""
    out = {"n_axes": len(fig.axes), "axes": []}
    for ax in fig.axes:
        data_lines, epsilon_lines = [], []
        for line in ax.lines:
            gid = line.get_gid() or ""
            if gid.startswith("epsilon-"):
                epsilon_lines.append({
                    "x": float(line.get_xdata()[0]),
                    "bold": line.get_linewidth() >= BOLD_LW,
                })
            else:
                data_lines.append({
                    "gid": gid,
                    "n_points": int(len(line.get_xdata())),
                    "bold": line.get_linewidth() >= BOLD_LW,
                })
        out["axes"].append({
            "title": ax.get_title(),
            "n_lines": len(data_lines),
            "lines": data_lines,
            "epsilon_lines": sorted(epsilon_lines, key=lambda e: e["x"]),
        })
    return out


def render(in_dir: str | Path, out_dir: str | Path,
           figure_names: list[str] | None = None,
           column: str = "trend") -> list[Path]:
    """Render the requested figures from a run directory; returns paths.

    All inputs are read and validated before the first file is written, so
    a bad scenario directory never leaves partial output behind.
    """
    from .reader import discover_scenarios

    scenarios = discover_scenarios(in_dir)
    names = figure_names or list(FIGURES)
    unknown = [n for n in names if n not in FIGURES]
    if unknown:
        raise DataError(
            f"unknown figure name(s) {unknown}; valid: {sorted(FIGURES)}")

    figures = {name: build_figure(FIGURES[name], scenarios, column)
               for name in names}

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, fig in figures.items():
        path = out_dir / f"{name}.png"
        fig.savefig(path, dpi=130)
        plt.close(fig)
        written.append(path)
    return written
