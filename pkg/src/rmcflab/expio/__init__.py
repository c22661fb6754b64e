"""Configuration, trace files, plots and the command-line driver."""

from .config import (CONFIG_SCHEMA, KINDS, ConfigError, ExperimentConfig, load_config,
                     parse_config, save_config, validate)
from .csvio import HEADER, read_trace_csv, write_trace_csv
from .plot import emit_energy_plot
from .shapes import build_shape, shape_spec

__all__ = ["CONFIG_SCHEMA", "KINDS", "ConfigError", "ExperimentConfig", "load_config",
           "parse_config", "save_config", "validate", "HEADER", "read_trace_csv",
           "write_trace_csv", "emit_energy_plot", "build_shape", "shape_spec"]
