"""Monte Carlo benchmarking of the estimators on simulated data.

Classes:
    ExperimentConfig: The experiment grid, methods and replication count.
    Stage: Enum of the points of a run at which losses are recorded.
    RunRecord: One per-mode loss.
"""

from .config import ExperimentConfig, load_experiment_config, parse_experiment_config
from .records import RECORD_COLUMNS, RunRecord, Stage, read_records, records_frame, write_records
from .runner import run_experiment, run_experiment_async, run_method, run_replication, sort_records
from .summary import summarize, write_summary
