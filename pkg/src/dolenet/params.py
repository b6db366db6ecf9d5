"""Scenario configuration: parameters, named presets, validation, file IO.

A scenario is fully described by a ``ScenarioConfig``. The nine named
presets differ only in the benefit replacement rate ``delta_g`` and the
maximum benefit duration ``epsilon``; every other parameter keeps its
baseline default. Config files are plain ``key = value`` text with ``#``
comments, one key per line.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    """Raised when a configuration value is out of bounds or unknown."""


# Replacement rate / maximum benefit duration for the nine named scenarios.
SCENARIOS: dict[str, tuple[float, int]] = {
    "baseline": (0.52, 360),
    "high": (0.69, 360),
    "low": (0.35, 360),
    "long": (0.52, 540),
    "short": (0.52, 180),
    "high-long": (0.69, 540),
    "high-short": (0.69, 180),
    "low-long": (0.35, 540),
    "low-short": (0.35, 180),
}

# Poverty-line dole: fixed fraction of the median wage of the employed.
POVERTY_RATE = 0.60

# Initial public debt per unit of nominal output at the stationary state.
DEFAULT_DEBT_TO_GDP = 502.9087653 / 5600.0

# Advances-to-deposits ratio the bank maintains while it holds bills.
DEFAULT_ADVANCES_RATIO = 1073.109302 / 4502.908765


@dataclass
class ScenarioConfig:
    """All exogenous parameters of one simulation scenario."""

    scenario: str = "baseline"

    # Benefit scheme
    delta_g: float = 0.52          # replacement rate, fraction of last wage
    epsilon: int = 360             # maximum benefit duration, steps
    expiry_mode: str = "spell"     # own-spell clock; "calendar" = sim time

    # Population and horizon
    n_households: int = 500
    n_firms: int = 5
    steps: int = 1080
    burn_in: int = 50
    replicates: int = 100
    master_seed: int = 0

    # Firm pricing / expectations / inventories
    markup: float = 0.4            # price over previous unit cost
    beta_exp: float = 0.3          # sales-expectation adjustment weight
    expectation_mode: str = "adaptive"   # "adaptive" or "as-written"
    sigma_inv: float = 1.0         # inventory target over expected sales
    lambda_exp: float = 0.1        # speed of inventory-gap closing

    # Fiscal / financial
    g_per_firm: float = 20.0       # real government purchases per firm
    tau_g: float | None = None     # wage tax rate; None = solved at init
    i_loans: float = 0.005
    i_bills: float = 0.004
    i_deposits: float = 0.003
    reserve_ratio: float = 0.35    # reserves demanded per unit of deposits
    advances_ratio: float = DEFAULT_ADVANCES_RATIO
    alpha_1: float = 0.8           # propensity to consume out of income
    alpha_2: float | None = None   # out of deposits; None = solved at init
    debt_to_gdp: float = DEFAULT_DEBT_TO_GDP

    # Behavioural kernel
    base_wage: float = 8.0
    monitoring_0: float = 0.5      # initial monitoring level m
    pfp_0: float = 0.5             # initial reward mix (1 = fully pooled)
    bonus_0: float = 0.0           # initial bonus rate mu
    bonus_max: float = 2.0
    kappa: float = 0.5             # task interdependence
    shirk_max: float = 0.5
    shirk_deterrence: float = 1.5
    shirk_tolerance: float = 0.2
    warning_penalty: float = 0.2
    warning_compliance_steps: int = 10
    quit_wage_drop: float = 0.02   # relative fall that counts as a cut
    rho_satisfaction: float = 0.1
    rho_interaction: float = 0.1
    strategy_review_period: int = 20
    strategy_step: float = 0.05
    strategy_deadband: float = 0.01    # rel. gain needed to act on a review
    adapt_bonus: bool = True       # hill-climb the bonus rate as well
    capacity_headroom: float = 0.2    # potential output margin over demand
    stationary_output: float = 558.787517

    # Friendship network
    mean_degree: float = 4.0
    homophily_o: float = 3.0       # same-type weight, openness-to-change
    homophily_c: float = 0.5       # same-type weight, conservatism
    homophily_se: float = 0.5      # same-type weight, self-enhancement
    homophily_st: float = 3.0      # same-type weight, self-transcendence
    homophily_cross: float = 1.0

    # Matching, firing rule, behavioural switches
    matching: str = "balanced"     # "balanced" or "iid"
    fire_rule: str = "or"          # warning predicate: "or" or "and"
    enable_adaptation: bool = True
    enable_monitoring: bool = True
    enable_quits: bool = True

    # Consistency checking / analysis
    sfc_tolerance: float = 1e-6
    sfc_strict: bool = True
    hp_lambda: float = 1600.0

    def homophily_same(self) -> tuple[float, float, float, float]:
        """Same-type pairing weights in value-type order (O, C, SE, ST)."""
        return (self.homophily_o, self.homophily_c,
                self.homophily_se, self.homophily_st)

    def validate(self) -> None:
        """Raise ConfigError on the first out-of-bounds parameter."""
        if not 0.0 < self.delta_g < 1.0:
            raise ConfigError(
                f"delta_g must lie in (0, 1), got {self.delta_g}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.expiry_mode not in ("calendar", "spell"):
            raise ConfigError(f"unknown expiry_mode {self.expiry_mode!r}")
        if self.expectation_mode not in ("adaptive", "as-written"):
            raise ConfigError(
                f"unknown expectation_mode {self.expectation_mode!r}")
        if self.matching not in ("balanced", "iid"):
            raise ConfigError(f"unknown matching mode {self.matching!r}")
        if self.fire_rule not in ("or", "and"):
            raise ConfigError(f"unknown fire_rule {self.fire_rule!r}")
        if self.n_households <= 0 or self.n_firms <= 0:
            raise ConfigError("n_households and n_firms must be positive")
        if self.n_households % self.n_firms:
            raise ConfigError(
                "n_households must be divisible by n_firms for the "
                "full-employment initial state")
        if self.steps <= 0:
            raise ConfigError(f"steps must be positive, got {self.steps}")
        if not 0 <= self.burn_in < self.steps:
            raise ConfigError(
                f"burn_in must lie in [0, steps), got {self.burn_in}")
        if self.replicates <= 0:
            raise ConfigError("replicates must be positive")
        if self.markup <= -1.0:
            raise ConfigError("markup must exceed -1")
        if not 0.0 < self.beta_exp <= 1.0:
            raise ConfigError("beta_exp must lie in (0, 1]")
        if self.sigma_inv < 0 or not 0.0 <= self.lambda_exp <= 1.0:
            raise ConfigError("bad inventory parameters")
        if not 0.0 < self.alpha_1 < 1.0:
            raise ConfigError("alpha_1 must lie in (0, 1)")
        if self.tau_g is not None and not 0.0 <= self.tau_g < 1.0:
            raise ConfigError("tau_g must lie in [0, 1)")
        for name in ("monitoring_0", "pfp_0", "kappa", "shirk_max",
                     "shirk_tolerance", "warning_penalty",
                     "rho_satisfaction", "rho_interaction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.shirk_deterrence < 0:
            raise ConfigError("shirk_deterrence must be non-negative")
        if self.capacity_headroom < 0:
            raise ConfigError("capacity_headroom must be non-negative")
        if self.warning_compliance_steps < 0:
            raise ConfigError("warning_compliance_steps must be >= 0")
        if not 0.0 <= self.quit_wage_drop < 1.0:
            raise ConfigError("quit_wage_drop must lie in [0, 1)")
        if self.bonus_0 < 0 or self.bonus_max < self.bonus_0:
            raise ConfigError("bonus_0 must lie in [0, bonus_max]")
        if self.base_wage <= 0:
            raise ConfigError("base_wage must be positive")
        if self.mean_degree < 0:
            raise ConfigError("mean_degree must be non-negative")
        if self.mean_degree >= self.n_households:
            raise ConfigError(
                f"mean_degree {self.mean_degree} must be smaller than "
                f"n_households {self.n_households}")
        if self.homophily_se >= self.homophily_cross:
            raise ConfigError(
                "self-enhancement same-type weight must be strictly below "
                "the cross-type weight")
        if self.homophily_c >= self.homophily_cross:
            raise ConfigError(
                "conservatism same-type weight must be strictly below "
                "the cross-type weight")
        if self.strategy_review_period <= 0:
            raise ConfigError("strategy_review_period must be positive")
        if not 0.0 < self.strategy_step <= 1.0:
            raise ConfigError("strategy_step must lie in (0, 1]")
        if self.strategy_deadband < 0:
            raise ConfigError("strategy_deadband must be non-negative")
        if self.stationary_output <= 0:
            raise ConfigError("stationary_output must be positive")
        if self.sfc_tolerance <= 0:
            raise ConfigError("sfc_tolerance must be positive")
        if self.hp_lambda <= 0:
            raise ConfigError("hp_lambda must be positive")

    def config_hash(self) -> str:
        """Stable hash of every parameter, for run manifests."""
        items = sorted(dataclasses.asdict(self).items())
        blob = "\n".join(f"{k}={v!r}" for k, v in items).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def scenario_config(name: str, **overrides) -> ScenarioConfig:
    """Build the config for one of the nine named scenarios."""
    key = name.lower()
    if key not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {name!r}; valid names: "
            + ", ".join(sorted(SCENARIOS)))
    delta_g, epsilon = SCENARIOS[key]
    cfg = ScenarioConfig(scenario=key, delta_g=delta_g, epsilon=epsilon,
                         **overrides)
    cfg.validate()
    return cfg


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _parse_value(name: str, raw: str):
    ftype = _FIELD_TYPES.get(name)
    if ftype is None:
        raise ConfigError(f"unknown config key {name!r}")
    raw = raw.strip()
    if ftype == "bool":
        if raw.lower() in ("true", "1", "yes", "on"):
            return True
        if raw.lower() in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean {name} = {raw!r}")
    if ftype == "int":
        return int(raw)
    if ftype == "float":
        return float(raw)
    if ftype in ("float | None", "int | None"):
        if raw.lower() in ("none", ""):
            return None
        return float(raw)
    return raw


def read_config(path: str | Path) -> ScenarioConfig:
    """Parse a ``key = value`` config file into a validated config."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = line.split("=", 1)
        key = key.strip()
        values[key] = _parse_value(key, raw)
    cfg = ScenarioConfig(**values)
    cfg.validate()
    return cfg


def write_config(cfg: ScenarioConfig, path: str | Path) -> None:
    """Write a config as a ``key = value`` file (round-trips read_config)."""
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name} = {'none' if v is None else v}")
    Path(path).write_text("\n".join(lines) + "\n")
