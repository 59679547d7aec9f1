"""
Experiment harness: coverage studies and CSV panel ingestion.
"""

from .coverage import (
    check_feasibility,
    idio_variance_truth,
    integrated_truth,
    run_coverage_study,
    run_trial,
)
from .ingest import IngestedPanel, export_panel_csv, ingest_csv_panel
from .models import (
    CsvSchema,
    ExperimentConfig,
    load_csv_schema,
    load_experiment_config,
    resolve_strength,
)

__all__ = [
    "CsvSchema",
    "ExperimentConfig",
    "IngestedPanel",
    "check_feasibility",
    "export_panel_csv",
    "idio_variance_truth",
    "ingest_csv_panel",
    "integrated_truth",
    "load_csv_schema",
    "load_experiment_config",
    "resolve_strength",
    "run_coverage_study",
    "run_trial",
]
