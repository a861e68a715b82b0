"""Lagged moment operators of a tensor time series: TOPUP, TIPUP, UP and the sample auto-cross-moment tensors.

TOPUP (Time series Outer-Product Unfolding Procedure) stacks the lagged outer-product moments
sum_t mat_k(X_{t-h}) ⊗ mat_k(X_t) / (T-h), h = 1..h0, into an order-5 tensor; the left singular vectors of its mode-1
unfolding estimate the mode-k loading space. TIPUP (Time series Inner-Product Unfolding Procedure) replaces the outer
product by the inner product sum_t mat_k(X_{t-h}) mat_k(X_t)^T / (T-h), which collapses every non-k mode. UP (Unfolding
Procedure) ignores time dependence and unfolds the (K+1)-order stack of all observations.

Tip:
    The lag-0 term is never included: the contemporaneous noise covariance would enter it.
"""

import logging
import string
from enum import Enum, unique

import numpy as np
from beartype.typing import Sequence
from pydantic import BaseModel, ConfigDict, Field

from ..errors import LagError, TensorShapeError
from ..tensor.core import DenseTensor, TensorSeries, check_mode, unfold_array, unfold_series

logger = logging.getLogger(__name__)

MAX_MATERIALIZED_ENTRIES = 20_000_000


@unique
class Flavor(Enum):
    """The moment operator used to estimate one mode's loading space."""

    TOPUP = "TOPUP"
    TIPUP = "TIPUP"
    UP = "UP"


class MomentConfig(BaseModel):
    """Configuration of a single moment-based loading estimate.

    Attributes:
        h0: The number of lags accumulated, h = 1..h0. Ignored by UP.
        flavor: The moment operator.
    """

    model_config = ConfigDict(frozen=True)

    h0: int = Field(1, ge=1, description="The number of lags accumulated, h = 1..h0 (ignored by UP)")
    flavor: Flavor = Field(Flavor.TOPUP, description="The moment operator")


def check_lag(series: TensorSeries, h0: int) -> None:
    """Validate a lag count against the series length.

    Args:
        series (TensorSeries): The series.
        h0 (int): The lag count.

    Raises:
        LagError: If h0 is not in 1..T-1.
    """
    if not 1 <= h0 < len(series):
        raise LagError(f"Lag count h0={h0} must satisfy 1 <= h0 < T={len(series)}")


def topup_gram(series: TensorSeries, k: int, h0: int = 1) -> np.ndarray:
    """The d_k x d_k gram matrix mat_1(TOPUP_k) mat_1(TOPUP_k)^T, without materializing the order-5 tensor.

    Uses the identity
        sum_h (T-h)^-2 sum_{t,s>h} <X_t, X_s> mat_k(X_{t-h}) mat_k(X_{s-h})^T,
    so memory scales with d_k^2 and T^2 instead of d^2 h0.

    Args:
        series (TensorSeries): The series X_1, ..., X_T.
        k (int): The 1-based mode.
        h0 (int, optional): The number of lags. Defaults to 1.

    Returns:
        np.ndarray: The symmetric PSD gram matrix.
    """
    check_lag(series, h0)
    T = len(series)
    mats = unfold_series(series, k)
    vecs = series.values.reshape(T, -1)
    inner = vecs @ vecs.T

    gram = np.zeros((mats.shape[1], mats.shape[1]))
    for h in range(1, h0 + 1):
        lagged = mats[: T - h]
        mixed = np.tensordot(inner[h:, h:], lagged, axes=(1, 0))
        gram += np.tensordot(lagged, mixed, axes=([0, 2], [0, 2])) / (T - h) ** 2

    return (gram + gram.T) / 2


def topup_unfolding(
    series: TensorSeries, k: int, h0: int = 1, max_entries: int = MAX_MATERIALIZED_ENTRIES
) -> np.ndarray:
    """The materialized mode-1 unfolding of the order-5 TOPUP tensor, of size d_k x (d^2 h0 / d_k).

    Args:
        series (TensorSeries): The series X_1, ..., X_T.
        k (int): The 1-based mode.
        h0 (int, optional): The number of lags. Defaults to 1.
        max_entries (int, optional): Refuse to build matrices with more entries than this.
            Defaults to MAX_MATERIALIZED_ENTRIES.

    Raises:
        TensorShapeError: If the unfolding would exceed max_entries.

    Returns:
        np.ndarray: The d_k x (d_{-k} d_k d_{-k} h0) matrix, lag blocks stacked left to right.
    """
    check_lag(series, h0)
    T = len(series)
    mats = unfold_series(series, k)
    d_k, d_rest = mats.shape[1], mats.shape[2]
    if d_k * d_rest * d_k * d_rest * h0 > max_entries:
        raise TensorShapeError(
            f"TOPUP unfolding of size {d_k} x {d_rest * d_k * d_rest * h0} exceeds the {max_entries} entry guard"
        )

    blocks = []
    for h in range(1, h0 + 1):
        outer = np.einsum("tab,tce->abce", mats[: T - h], mats[h:]) / (T - h)
        blocks.append(outer.reshape((d_k, -1), order="F"))
    return np.hstack(blocks)


def tipup_matrix(series: TensorSeries, k: int, h0: int = 1) -> np.ndarray:
    """The d_k x (d_k h0) TIPUP matrix: lag-h inner-product moments stacked left to right.

    Args:
        series (TensorSeries): The series X_1, ..., X_T.
        k (int): The 1-based mode.
        h0 (int, optional): The number of lags. Defaults to 1.

    Returns:
        np.ndarray: Block h is sum_t mat_k(X_{t-h}) mat_k(X_t)^T / (T-h).
    """
    check_lag(series, h0)
    T = len(series)
    mats = unfold_series(series, k)
    return np.hstack([np.einsum("tab,tcb->ac", mats[: T - h], mats[h:]) / (T - h) for h in range(1, h0 + 1)])


def lag0_tipup(series: TensorSeries, k: int) -> np.ndarray:
    """The contemporaneous inner-product moment sum_t mat_k(X_t) mat_k(X_t)^T / T.

    Args:
        series (TensorSeries): The series.
        k (int): The 1-based mode.

    Returns:
        np.ndarray: The d_k x d_k matrix.
    """
    mats = unfold_series(series, k)
    return np.einsum("tab,tcb->ac", mats, mats) / len(series)


def up_unfolding(series: TensorSeries, k: int) -> np.ndarray:
    """Mode-k unfolding of the (K+1)-order tensor (X_1, ..., X_T), with time as the last mode.

    Args:
        series (TensorSeries): The series.
        k (int): The 1-based mode, 1 <= k <= K.

    Returns:
        np.ndarray: The d_k x (d_{-k} T) matrix.
    """
    check_mode(k, series.order)
    return unfold_array(np.moveaxis(series.values, 0, -1), k)


def lagged_autocovariance(series: TensorSeries, h: int) -> DenseTensor:
    """The sample lag-h auto-cross-moment tensor sum_{t>h} X_{t-h} ⊗ X_t / (T-h), of order 2K.

    Args:
        series (TensorSeries): The series, of order K <= 4.
        h (int): The lag, 1 <= h < T.

    Returns:
        DenseTensor: The order-2K tensor with dims (d_1, ..., d_K, d_1, ..., d_K).
    """
    check_lag(series, h)
    T = len(series)
    return DenseTensor(data=np.tensordot(series.values[: T - h], series.values[h:], axes=(0, 0)) / (T - h))


def _autocov_order(sigmas: Sequence[DenseTensor]) -> int:
    orders = {s.order for s in sigmas}
    if len(sigmas) == 0 or len(orders) != 1 or next(iter(orders)) % 2:
        raise TensorShapeError(f"Expected a nonempty list of same-order, even-order moment tensors, got {orders}")
    return next(iter(orders)) // 2


def autocov_topup_unfolding(sigmas: Sequence[DenseTensor], k: int) -> np.ndarray:
    """TOPUP unfolding rebuilt from the lag-h moment tensors Σ_1, ..., Σ_h0.

    The columns are a permutation of those of `topup_unfolding`, so gram matrices and left singular spaces agree.

    Args:
        sigmas (Sequence[DenseTensor]): The order-2K moment tensors for h = 1..h0.
        k (int): The 1-based mode, 1 <= k <= K.

    Returns:
        np.ndarray: A d_k x (d^2 h0 / d_k) matrix.
    """
    K = _autocov_order(sigmas)
    axis = check_mode(k, K)
    return np.hstack([np.moveaxis(s.data, axis, 0).reshape((s.dims[axis], -1), order="F") for s in sigmas])


def autocov_tipup_matrix(sigmas: Sequence[DenseTensor], k: int) -> np.ndarray:
    """TIPUP matrix rebuilt from the lag-h moment tensors, as the contraction <Σ_h, I_{k,k+K}>.

    Every index pair (j, j+K) with j != k is summed along the diagonal.

    Args:
        sigmas (Sequence[DenseTensor]): The order-2K moment tensors for h = 1..h0.
        k (int): The 1-based mode, 1 <= k <= K.

    Returns:
        np.ndarray: The d_k x (d_k h0) matrix.
    """
    K = _autocov_order(sigmas)
    axis = check_mode(k, K)
    letters = string.ascii_lowercase
    left = list(letters[:K])
    right = list(left)
    right[axis] = letters[K]
    subscripts = f"{''.join(left)}{''.join(right)}->{left[axis]}{right[axis]}"
    return np.hstack([np.einsum(subscripts, s.data) for s in sigmas])
