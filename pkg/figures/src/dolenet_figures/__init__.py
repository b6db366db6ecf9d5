"""Panel figures for dolenet scenario runs, driven by aggregated CSVs."""

__version__ = "0.1.0"

from .reader import DataError, discover_scenarios, read_aggregated
from .render import build_figure, figure_structure, render

__all__ = ["DataError", "build_figure", "discover_scenarios",
           "figure_structure", "read_aggregated", "render", "__version__"]
