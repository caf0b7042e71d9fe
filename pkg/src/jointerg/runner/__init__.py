"""Experiment configs, the staged pipeline, report emitters and the CLI."""
from .config import ExperimentConfig, default_config, load_config, parse_config
from .emit import emit, to_csv_text, to_json_text
from .pipeline import STAGES, RunReport, run_pipeline
from .tuplespec import load_tuple_spec, parse_tuple_spec

__all__ = ["ExperimentConfig", "default_config", "load_config", "parse_config", "emit",
           "to_csv_text", "to_json_text", "STAGES", "RunReport", "run_pipeline",
           "load_tuple_spec", "parse_tuple_spec"]
