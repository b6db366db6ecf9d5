"""dolenet: an agent-based, stock-flow-consistent closed economy with
social-network-mediated hiring, firing and quitting, and configurable
unemployment-benefit schemes."""

__version__ = "0.1.0"

from .engine import (EconomyState, init_stationary_state, run_replicate,
                     run_scenario, solve_stationary, step)
from .params import SCENARIOS, ScenarioConfig, scenario_config

__all__ = [
    "EconomyState",
    "SCENARIOS",
    "ScenarioConfig",
    "init_stationary_state",
    "run_replicate",
    "run_scenario",
    "scenario_config",
    "solve_stationary",
    "step",
    "__version__",
]
