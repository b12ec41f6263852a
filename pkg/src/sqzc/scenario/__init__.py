"""Scenario files, figure recipes, sweeps and output writers."""
from .config import (
    OutputConfig,
    ScenarioConfig,
    SolverConfig,
    SweepAxis,
    Variant,
    WignerSpec,
    config_to_dict,
    dump_config,
    load_config,
    parse_config,
)
from .emit import DistributionTable, distribution_table, emit_csv, emit_svg
from .recipes import RECIPES, recipe
from .sweep import SweepResult, evaluate_point, run_sweep
