from .artifacts import run_scenario, write_csv
from .catalog import PRESETS, catalog, preset
from .config import SCHEMA_VERSION, ScenarioConfig, ScenarioConfigError, load_config
from .runners import RunResult, run_config
from .svg import PlotError, PlotSpec, plot_lines

__all__ = [
    "PRESETS",
    "SCHEMA_VERSION",
    "PlotError",
    "PlotSpec",
    "RunResult",
    "ScenarioConfig",
    "ScenarioConfigError",
    "catalog",
    "load_config",
    "plot_lines",
    "preset",
    "run_config",
    "run_scenario",
    "write_csv",
]
