"""Deterministic simulation harness."""

from .config import ScenarioConfig, format_config, load_config, parse_config_text
from .design import DesignKind, generate_design, sample_responses
from .io import ingest_csv
from .scenario import (
    RiskReport,
    ScenarioReport,
    SweepPoint,
    TableRow,
    comparison_table,
    misspecification_sweep,
    run_scenario,
)

__all__ = [
    "DesignKind",
    "RiskReport",
    "ScenarioConfig",
    "ScenarioReport",
    "SweepPoint",
    "TableRow",
    "comparison_table",
    "format_config",
    "generate_design",
    "ingest_csv",
    "load_config",
    "misspecification_sweep",
    "parse_config_text",
    "run_scenario",
    "sample_responses",
]
