"""Summary statistics of Monte Carlo records, per (setting, T, lambda, h0, method, mode, stage) cell."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from beartype.typing import Sequence, Union

from ..errors import EmptyRecordsError
from .records import RunRecord, records_frame

logger = logging.getLogger(__name__)

LOSS_FLOOR = 1e-16
CELL_COLUMNS = ["setting", "T", "lambda", "h0", "method", "mode", "stage"]


def summarize(records: Sequence[RunRecord]) -> pd.DataFrame:
    """Aggregate the natural log of the loss (floored at 1e-16) per cell.

    Quartiles use linear interpolation between order statistics.

    Args:
        records (Sequence[RunRecord]): The records.

    Raises:
        EmptyRecordsError: If there are no records.

    Returns:
        pd.DataFrame: One row per cell with n, median_log_loss, q1_log_loss, q3_log_loss, mean_log_loss and
            median_iters, in the order cells first appear.
    """
    if len(records) == 0:
        raise EmptyRecordsError("Cannot summarize an empty set of run records")

    frame = records_frame(records)
    frame["log_loss"] = np.log(np.maximum(frame["loss"].to_numpy(dtype=np.float64), LOSS_FLOOR))

    grouped = frame.groupby(CELL_COLUMNS, sort=False)
    summary = grouped.agg(
        n=("log_loss", "size"),
        median_log_loss=("log_loss", "median"),
        q1_log_loss=("log_loss", lambda s: s.quantile(0.25)),
        q3_log_loss=("log_loss", lambda s: s.quantile(0.75)),
        mean_log_loss=("log_loss", "mean"),
        median_iters=("iters", "median"),
    )
    return summary.reset_index()


def write_summary(records: Sequence[RunRecord], path: Union[str, Path]) -> Path:
    """Summarize records and write the table as CSV.

    Args:
        records (Sequence[RunRecord]): The records.
        path (Union[str, Path]): The target file.

    Returns:
        Path: The path written.
    """
    path = Path(path)
    summarize(records).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info(f"Wrote summary of {len(records)} run records to {path}")
    return path
