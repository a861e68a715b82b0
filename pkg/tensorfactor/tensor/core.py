"""Pydantic containers for dense tensors and tensor time series, and the multilinear algebra built on them.

Layout convention:
    The flat layout of a tensor is column-major: the first index varies fastest. For K=2 this makes the mode-1
    unfolding a plain reshape of the flat data. Mode-k unfoldings order their columns cyclically over the modes
    k+1, ..., K, 1, ..., k-1, with the first of these varying fastest. For K=3 this is exactly

        (mat_1(A))[i, j + d_2 (k-1)] = (mat_2(A))[j, k + d_3 (i-1)] = (mat_3(A))[k, i + d_1 (j-1)] = A[i, j, k]

Tip:
    Modes are 1-based everywhere in the public API (mode k is numpy axis k - 1). Time in a TensorSeries is the
    leading numpy axis, and indexes like any python sequence.
"""

import logging

import numpy as np
from beartype import beartype
from beartype.typing import List, Sequence, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import TensorShapeError

logger = logging.getLogger(__name__)

MAX_ORDER = 8


def _frozen_float_array(value: object) -> np.ndarray:
    arr = np.array(value, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def check_mode(k: int, order: int) -> int:
    """Validate a 1-based mode index and convert it to a numpy axis.

    Args:
        k (int): The 1-based mode index.
        order (int): The tensor order K.

    Raises:
        TensorShapeError: If k is not in 1..K.

    Returns:
        int: The 0-based numpy axis for mode k.
    """
    if not 1 <= k <= order:
        raise TensorShapeError(f"Mode {k} is out of range for an order-{order} tensor (expected 1..{order})")
    return k - 1


def cyclic_axes(axis: int, order: int) -> List[int]:
    """Axis permutation placing `axis` first, followed by the remaining axes in cyclic order.

    Args:
        axis (int): The 0-based axis that becomes the row index.
        order (int): The tensor order K.

    Returns:
        List[int]: [axis, axis+1, ..., K-1, 0, ..., axis-1]
    """
    return [(axis + i) % order for i in range(order)]


class DenseTensor(BaseModel):
    """An order-K real tensor with an explicit dimension vector.

    Houses the observed tensors X_t, the signal M_t, the noise E_t, the factors F_t and the projected tensors Z_t.
    The underlying array is copied to float64 and made read-only on construction.

    Attributes:
        data: The order-K float64 array, 1 <= K <= 8, every dimension >= 1.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray = Field(..., description="The order-K float64 array holding the tensor entries")

    @field_validator("data", mode="before")
    @classmethod
    def _validate_data(cls, value: object) -> np.ndarray:
        arr = _frozen_float_array(value)
        if arr.ndim < 1:
            raise TensorShapeError("A DenseTensor must have order K >= 1; order-0 scalars are rejected")
        if arr.ndim > MAX_ORDER:
            raise TensorShapeError(f"Orders above {MAX_ORDER} are not supported, got order {arr.ndim}")
        if arr.size == 0:
            raise TensorShapeError(f"Every dimension must be positive, got dims {arr.shape}")
        return arr

    @classmethod
    def from_flat(cls, dims: Sequence[int], flat: Sequence[float]) -> "DenseTensor":
        """Build a tensor from its flat data in the documented column-major layout.

        Args:
            dims (Sequence[int]): The dimension vector (d_1, ..., d_K).
            flat (Sequence[float]): Flat data of length prod(dims), first index varying fastest.

        Raises:
            TensorShapeError: If the data length does not match the dimension vector.

        Returns:
            DenseTensor: The tensor.
        """
        flat_arr = np.asarray(flat, dtype=np.float64).ravel()
        dims = tuple(int(d) for d in dims)
        if flat_arr.size != int(np.prod(dims)) or len(dims) == 0:
            raise TensorShapeError(f"Flat data of length {flat_arr.size} does not fit dims {dims}")
        return cls(data=flat_arr.reshape(dims, order="F"))

    @property
    def dims(self) -> Tuple[int, ...]:
        """The dimension vector (d_1, ..., d_K)."""
        return tuple(self.data.shape)

    @property
    def order(self) -> int:
        """The tensor order K."""
        return self.data.ndim

    def flat(self) -> np.ndarray:
        """Return the flat data in the documented column-major layout.

        Returns:
            np.ndarray: A vector of length prod(dims).
        """
        return self.data.ravel(order="F")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self.data, other.data))

    __hash__ = None


class TensorSeries(BaseModel):
    """An ordered, time-indexed series X_1, ..., X_T of same-shape tensors.

    The series is stored as a single (T, d_1, ..., d_K) array with time as the leading axis.

    Attributes:
        values: The stacked float64 array, T >= 2.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray = Field(..., description="The (T, d_1, ..., d_K) array of stacked observations")

    @field_validator("values", mode="before")
    @classmethod
    def _validate_values(cls, value: object) -> np.ndarray:
        arr = _frozen_float_array(value)
        if arr.ndim < 2:
            raise TensorShapeError("A TensorSeries needs a time axis plus at least one tensor mode")
        if arr.ndim - 1 > MAX_ORDER:
            raise TensorShapeError(f"Orders above {MAX_ORDER} are not supported, got order {arr.ndim - 1}")
        if arr.shape[0] < 2:
            raise TensorShapeError(f"A TensorSeries needs T >= 2 observations, got {arr.shape[0]}")
        if arr.size == 0:
            raise TensorShapeError(f"Every dimension must be positive, got shape {arr.shape[1:]}")
        return arr

    @classmethod
    def from_items(cls, items: Sequence[DenseTensor]) -> "TensorSeries":
        """Stack a time-ordered list of tensors into a series.

        Args:
            items (Sequence[DenseTensor]): The tensors X_1, ..., X_T.

        Raises:
            TensorShapeError: If the tensors do not all share one dimension vector.

        Returns:
            TensorSeries: The series.
        """
        shapes = {item.dims for item in items}
        if len(shapes) > 1:
            raise TensorShapeError(f"All items of a TensorSeries must share a shape, got {sorted(shapes)}")
        return cls(values=np.stack([item.data for item in items]))

    @property
    def shape(self) -> Tuple[int, ...]:
        """The shared dimension vector (d_1, ..., d_K) of every item."""
        return tuple(self.values.shape[1:])

    @property
    def order(self) -> int:
        """The order K of every item."""
        return self.values.ndim - 1

    @property
    def items(self) -> List[DenseTensor]:
        """The series as a list of DenseTensors."""
        return [DenseTensor(data=v) for v in self.values]

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, t: int) -> DenseTensor:
        return DenseTensor(data=self.values[t])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorSeries):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values)) and self.values.shape == other.values.shape

    __hash__ = None


def unfold_array(arr: np.ndarray, k: int) -> np.ndarray:
    """Mode-k unfolding of a raw array, following the cyclic column convention.

    Args:
        arr (np.ndarray): An order-K array.
        k (int): The 1-based mode.

    Returns:
        np.ndarray: The d_k x d_{-k} matrix.
    """
    axis = check_mode(k, arr.ndim)
    moved = np.transpose(arr, cyclic_axes(axis, arr.ndim))
    return moved.reshape((arr.shape[axis], -1), order="F")


@beartype
def unfold(x: DenseTensor, k: int) -> np.ndarray:
    """Mode-k unfolding (matricization) of a tensor.

    Args:
        x (DenseTensor): The tensor.
        k (int): The 1-based mode, 1 <= k <= K.

    Returns:
        np.ndarray: The d_k x d_{-k} matrix mat_k(x).
    """
    return unfold_array(x.data, k)


@beartype
def refold(m: np.ndarray, k: int, dims: Sequence[int]) -> DenseTensor:
    """Inverse of `unfold`: rebuild a tensor from its mode-k unfolding.

    Args:
        m (np.ndarray): A d_k x d_{-k} matrix (a length-d_1 vector is accepted for order-1 tensors).
        k (int): The 1-based mode the matrix was unfolded along.
        dims (Sequence[int]): The dimension vector of the tensor to rebuild.

    Raises:
        TensorShapeError: If the matrix size is inconsistent with dims.

    Returns:
        DenseTensor: The tensor whose mode-k unfolding is m.
    """
    dims = tuple(int(d) for d in dims)
    axis = check_mode(k, len(dims))
    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    expected = (dims[axis], int(np.prod(dims)) // dims[axis])
    if m.shape != expected:
        raise TensorShapeError(f"Matrix of shape {m.shape} cannot be refolded along mode {k} into dims {dims}")
    perm = cyclic_axes(axis, len(dims))
    moved = m.reshape([dims[p] for p in perm], order="F")
    return DenseTensor(data=np.transpose(moved, np.argsort(perm)))


@beartype
def mode_product(x: DenseTensor, u: np.ndarray, k: int) -> DenseTensor:
    """The k-mode product x ×_k u, contracting mode k of x with the columns of u.

    Args:
        x (DenseTensor): The tensor, with d_k entries along mode k.
        u (np.ndarray): A d'_k x d_k matrix.
        k (int): The 1-based mode.

    Raises:
        TensorShapeError: If u does not have d_k columns.

    Returns:
        DenseTensor: The product, with d'_k entries along mode k.
    """
    axis = check_mode(k, x.order)
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    if u.shape[1] != x.dims[axis]:
        raise TensorShapeError(f"Matrix with {u.shape[1]} columns cannot multiply mode {k} of dims {x.dims}")
    return DenseTensor(data=np.moveaxis(np.tensordot(u, x.data, axes=(1, axis)), 0, axis))


@beartype
def outer_product(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    """Tensor (outer) product a ⊗ b, of order K_a + K_b.

    Args:
        a (DenseTensor): The left factor.
        b (DenseTensor): The right factor.

    Raises:
        TensorShapeError: If the product would exceed the supported order.

    Returns:
        DenseTensor: The tensor with entries a[i...] * b[j...].
    """
    if a.order + b.order > MAX_ORDER:
        raise TensorShapeError(f"Outer product of orders {a.order} and {b.order} exceeds order {MAX_ORDER}")
    return DenseTensor(data=np.multiply.outer(a.data, b.data))


@beartype
def hs_norm(x: DenseTensor) -> float:
    """Hilbert-Schmidt norm: the Euclidean norm of all entries.

    Args:
        x (DenseTensor): The tensor.

    Returns:
        float: sqrt of the sum of squared entries.
    """
    return float(np.linalg.norm(x.data.ravel()))


def unfold_series(series: TensorSeries, k: int) -> np.ndarray:
    """Unfold every item of a series along mode k at once.

    Args:
        series (TensorSeries): The series X_1, ..., X_T.
        k (int): The 1-based mode.

    Returns:
        np.ndarray: A (T, d_k, d_{-k}) array whose t-th slice is mat_k(X_t).
    """
    order = series.order
    axis = check_mode(k, order)
    perm = [0] + [1 + a for a in cyclic_axes(axis, order)]
    moved = np.transpose(series.values, perm)
    return moved.reshape((len(series), series.shape[axis], -1), order="F")


def series_mode_product(series: TensorSeries, u: np.ndarray, k: int) -> TensorSeries:
    """Apply the same k-mode product to every item of a series.

    Args:
        series (TensorSeries): The series.
        u (np.ndarray): A d'_k x d_k matrix.
        k (int): The 1-based mode.

    Raises:
        TensorShapeError: If u does not have d_k columns.

    Returns:
        TensorSeries: The series of products X_t ×_k u.
    """
    axis = check_mode(k, series.order)
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    if u.shape[1] != series.shape[axis]:
        raise TensorShapeError(
            f"Matrix with {u.shape[1]} columns cannot multiply mode {k} of a series with shape {series.shape}"
        )
    return TensorSeries(values=np.moveaxis(np.tensordot(u, series.values, axes=(1, axis + 1)), 0, axis + 1))
