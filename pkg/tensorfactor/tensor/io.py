"""Reading and writing tensor series in the tensorfactor container formats.

Two containers are supported, picked by file suffix:

* binary (any suffix other than `.csv`): the magic bytes `TFS1`, then little-endian int64 values K, d_1..d_K, T,
  then T * prod(d) little-endian float64 values. Each tensor is written as its flat data in the column-major layout,
  one tensor after the other in time order.
* CSV (`.csv`): a header row `K,d_1,...,d_K`, then one row per time point holding the flat data of that tensor.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from beartype.typing import Tuple, Union

from ..errors import ConfigError
from .core import TensorSeries

logger = logging.getLogger(__name__)

MAGIC = b"TFS1"
_INT = np.dtype("<i8")
_FLOAT = np.dtype("<f8")


def _flat_rows(series: TensorSeries) -> np.ndarray:
    # Column-major flattening of each tensor: transpose the tensor axes, then C-order reshape
    tensor_axes = list(range(series.order, 0, -1))
    return np.transpose(series.values, [0] + tensor_axes).reshape(len(series), -1)


def _from_flat_rows(rows: np.ndarray, dims: tuple) -> TensorSeries:
    reversed_dims = tuple(reversed(dims))
    stacked = rows.reshape((rows.shape[0],) + reversed_dims)
    return TensorSeries(values=np.transpose(stacked, [0] + list(range(len(dims), 0, -1))))


def write_series(series: TensorSeries, path: Union[str, Path]) -> Path:
    """Write a series to disk, as CSV when the suffix is `.csv` and as the binary container otherwise.

    Args:
        series (TensorSeries): The series to write.
        path (Union[str, Path]): The target file.

    Returns:
        Path: The path written.
    """
    path = Path(path)
    rows = _flat_rows(series)

    if path.suffix.lower() == ".csv":
        frame = pd.DataFrame(rows)
        with path.open("w", newline="") as handle:
            handle.write(",".join(str(v) for v in [series.order, *series.shape]) + "\n")
            frame.to_csv(handle, header=False, index=False, float_format="%.17g")
    else:
        with path.open("wb") as handle:
            handle.write(MAGIC)
            handle.write(np.asarray([series.order, *series.shape, len(series)], dtype=_INT).tobytes())
            handle.write(np.ascontiguousarray(rows, dtype=_FLOAT).tobytes())

    logger.info(f"Wrote series of shape {series.shape} with T={len(series)} to {path}")
    return path


def _read_csv(path: Path) -> Tuple[Tuple[int, ...], np.ndarray]:
    with path.open("r") as handle:
        fields = handle.readline().strip().split(",")
        try:
            header = [int(v) for v in fields if v != ""]
        except ValueError:
            raise ConfigError(f"{path}: header must be integers 'K,d_1,...,d_K', got {fields}") from None
        if len(header) < 2 or header[0] != len(header) - 1 or min(header[1:]) < 1:
            raise ConfigError(f"{path}: header must be 'K,d_1,...,d_K', got {header}")
        try:
            rows = pd.read_csv(handle, header=None, dtype=np.float64, float_precision="round_trip").to_numpy()
        except ValueError as e:
            raise ConfigError(f"{path}: rows are not numeric tensor data ({e})") from e
    return tuple(header[1:]), rows


def _read_binary(path: Path) -> Tuple[Tuple[int, ...], np.ndarray]:
    raw = path.read_bytes()
    if raw[:4] != MAGIC:
        raise ConfigError(f"{path}: not a tensorfactor binary container (bad magic bytes)")
    if len(raw) < 4 + _INT.itemsize:
        raise ConfigError(f"{path}: header ends before the tensor order")
    order = int(np.frombuffer(raw, dtype=_INT, count=1, offset=4)[0])
    if not 1 <= order <= 8:
        raise ConfigError(f"{path}: invalid tensor order {order}")

    offset = 4 + _INT.itemsize * (order + 2)
    if len(raw) < offset:
        raise ConfigError(f"{path}: header of {len(raw)} bytes is too short for order {order}")
    meta = np.frombuffer(raw, dtype=_INT, count=order + 1, offset=4 + _INT.itemsize)
    dims, T = tuple(int(d) for d in meta[:order]), int(meta[order])
    if min(dims) < 1 or T < 1:
        raise ConfigError(f"{path}: dims {dims} and T={T} must be positive")

    expected = T * int(np.prod(dims))
    if len(raw) - offset != expected * _FLOAT.itemsize:
        raise ConfigError(f"{path}: expected {expected} values for dims {dims}, T={T}, got {len(raw) - offset} bytes")
    rows = np.frombuffer(raw, dtype=_FLOAT, offset=offset).reshape(T, -1)
    return dims, rows


def read_series(path: Union[str, Path]) -> TensorSeries:
    """Read a series written by `write_series` (or by any tool following the documented container layout).

    Args:
        path (Union[str, Path]): The file to read.

    Raises:
        ConfigError: If the file does not follow the container layout.

    Returns:
        TensorSeries: The series.
    """
    path = Path(path)
    dims, rows = _read_csv(path) if path.suffix.lower() == ".csv" else _read_binary(path)

    if rows.ndim != 2 or rows.shape[1] != int(np.prod(dims)):
        raise ConfigError(f"{path}: rows of length {rows.shape[-1]} do not fit dims {dims}")

    logger.info(f"Read series of shape {dims} with T={rows.shape[0]} from {path}")
    return _from_flat_rows(rows, dims)
