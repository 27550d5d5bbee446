"""Command-line front end: YAML scenarios in, CSV or JSON tables out."""

from .config import COMMANDS, ConfigError, ScenarioConfig, load_config, parse_config
from .table import ResultTable, emit, from_json, to_csv, to_json

__all__ = [
    "COMMANDS",
    "ConfigError",
    "ResultTable",
    "ScenarioConfig",
    "emit",
    "from_json",
    "load_config",
    "parse_config",
    "to_csv",
    "to_json",
]
