"""Per-mode loss records of a Monte Carlo experiment, and their CSV file format."""

import logging
from enum import Enum, unique
from pathlib import Path

import pandas as pd
from beartype.typing import List, Sequence, Union
from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "rep",
    "setting",
    "T",
    "lambda",
    "h0",
    "method",
    "mode",
    "stage",
    "loss",
    "iters",
    "lambda_hat_sq",
    "lambda_star_hat_sq",
    "wall_time_ms",
]


@unique
class Stage(Enum):
    """The point of a run at which a loss is measured."""

    INIT = "init"
    SWEEP1 = "sweep1"
    FINAL = "final"

    @property
    def rank(self) -> int:
        """Position of the stage within a run."""
        return list(Stage).index(self)


class RunRecord(BaseModel):
    """The loss of one method on one mode of one simulated data set, at one stage.

    Attributes:
        rep: The replication index.
        setting: The setting label.
        T: The series length.
        lambda_: The signal scale (alias "lambda").
        h0: The lag count.
        method: The method preset.
        mode: The 1-based mode.
        stage: The stage the loss was measured at.
        loss: The subspace distance to the true loading space.
        iters: Sweeps performed up to the stage.
        lambda_hat_sq: Estimated TOPUP signal strength of the mode, at the final bases.
        lambda_star_hat_sq: Estimated TIPUP signal strength of the mode, at the final bases.
        wall_time_ms: Wall time of the whole run, 0 when timing is off.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    rep: int = Field(..., ge=0)
    setting: str = Field(...)
    T: int = Field(..., ge=2)
    lambda_: float = Field(..., alias="lambda", ge=0)
    h0: int = Field(..., ge=1)
    method: str = Field(...)
    mode: int = Field(..., ge=1)
    stage: Stage = Field(...)
    loss: float = Field(..., ge=0, le=1)
    iters: int = Field(..., ge=0)
    lambda_hat_sq: float = Field(..., ge=0)
    lambda_star_hat_sq: float = Field(..., ge=0)
    wall_time_ms: float = Field(0.0, ge=0)


def records_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    """Tabulate records with the CSV column names and order.

    Args:
        records (Sequence[RunRecord]): The records.

    Returns:
        pd.DataFrame: One row per record.
    """
    rows = [r.model_dump(mode="json", by_alias=True) for r in records]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def write_records(records: Sequence[RunRecord], path: Union[str, Path]) -> Path:
    """Write records as CSV with the header `rep,setting,T,lambda,h0,method,mode,stage,loss,...`.

    Args:
        records (Sequence[RunRecord]): The records, already in output order.
        path (Union[str, Path]): The target file.

    Returns:
        Path: The path written.
    """
    path = Path(path)
    records_frame(records).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info(f"Wrote {len(records)} run records to {path}")
    return path


def read_records(path: Union[str, Path]) -> List[RunRecord]:
    """Read records written by `write_records`.

    Args:
        path (Union[str, Path]): The CSV file.

    Returns:
        List[RunRecord]: The records, in file order.
    """
    frame = pd.read_csv(path, dtype={"setting": str, "method": str}, float_precision="round_trip")
    return [RunRecord(**row) for row in frame.to_dict(orient="records")]
