"""Figure layouts: panels, metric-to-axis mappings, scenario colours and
benefit-expiry annotations."""

from __future__ import annotations

from dataclasses import dataclass, field

# Benefit duration per scenario, used to place expiry markers.
SCENARIO_EPSILON = {
    "baseline": 360, "high": 360, "low": 360,
    "long": 540, "short": 180,
    "high-long": 540, "high-short": 180,
    "low-long": 540, "low-short": 180,
}

BASELINE = "baseline"

SCENARIO_COLORS = {
    "baseline": "black", "high": "tab:red", "low": "tab:blue",
    "long": "tab:orange", "short": "tab:green",
    "high-long": "tab:purple", "high-short": "tab:pink",
    "low-long": "tab:brown", "low-short": "tab:cyan",
}

VALUE_TYPE_METRICS = {
    "satisfaction": ["satisfaction_o", "satisfaction_c", "satisfaction_se",
                     "satisfaction_st"],
    "match_quality": ["match_quality_o", "match_quality_c",
                      "match_quality_se", "match_quality_st"],
}
VALUE_TYPE_LABELS = ["openness", "conservatism", "self-enhancement",
                     "self-transcendence"]


@dataclass
class Panel:
    title: str
    metrics: list[str]                 # metrics in multi-scenario overlays
    by_type: str | None = None         # value-type block in single mode
    labels: list[str] = field(default_factory=list)


@dataclass
class FigureSpec:
    name: str
    panels: list[Panel]


FIGURES: dict[str, FigureSpec] = {
    "labour_market": FigureSpec("labour_market", [
        Panel("Unemployment rate", ["unemployment_rate"]),
        Panel("Normalized unemployment spell", ["unemployment_spell_norm"]),
        Panel("Labour turnover", ["turnover"]),
    ]),
    "management": FigureSpec("management", [
        Panel("Monitoring", ["monitoring_mean"]),
        Panel("Reward pooling", ["pfp_mean"]),
    ]),
    "workers": FigureSpec("workers", [
        Panel("Satisfaction", ["satisfaction_mean"],
              by_type="satisfaction", labels=VALUE_TYPE_LABELS),
        Panel("Job-matching quality", ["match_quality_mean"],
              by_type="match_quality", labels=VALUE_TYPE_LABELS),
    ]),
    "real_economy": FigureSpec("real_economy", [
        Panel("Real output", ["gdp_real"]),
        Panel("Real consumption", ["consumption_real"]),
        Panel("Labour demand", ["labour_demand"]),
    ]),
}
