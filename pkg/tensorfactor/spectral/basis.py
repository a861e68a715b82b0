"""Pydantic BaseModels for orthonormal bases and per-mode sets of them.

An OrthoBasis stands for a column space: the estimated or true loading space of one mode. Two bases that differ by an
orthogonal rotation represent the same space, so comparisons between bases should go through `projector` or
`subspace_distance` rather than the raw columns.
"""

import numpy as np
from beartype.typing import List, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import TensorShapeError
from ..tensor.core import check_mode

ORTHONORMAL_TOL = 1e-10


class OrthoBasis(BaseModel):
    """A d x m matrix with orthonormal columns, m <= d.

    Attributes:
        cols: The d x m float64 matrix; cols.T @ cols equals I_m within 1e-10.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    cols: np.ndarray = Field(..., description="The d x m matrix with orthonormal columns")

    @field_validator("cols", mode="before")
    @classmethod
    def _validate_cols(cls, value: object) -> np.ndarray:
        arr = np.array(value, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise TensorShapeError(f"An OrthoBasis needs a d x m matrix with m >= 1, got shape {arr.shape}")
        if arr.shape[1] > arr.shape[0]:
            raise TensorShapeError(f"An OrthoBasis cannot have more columns than rows, got shape {arr.shape}")
        gap = np.abs(arr.T @ arr - np.eye(arr.shape[1])).max()
        if gap > ORTHONORMAL_TOL:
            raise ValueError(f"Columns are not orthonormal: max |U^T U - I| = {gap:.3e}")
        arr.setflags(write=False)
        return arr

    @property
    def dim(self) -> int:
        """The ambient dimension d."""
        return self.cols.shape[0]

    @property
    def rank(self) -> int:
        """The number of columns m."""
        return self.cols.shape[1]

    @classmethod
    def identity(cls, d: int) -> "OrthoBasis":
        """The standard basis of R^d.

        Args:
            d (int): The ambient dimension.

        Returns:
            OrthoBasis: I_d as a basis.
        """
        return cls(cols=np.eye(d))


class LoadingSet(BaseModel):
    """One orthonormal basis per mode, the estimated (or true) loading spaces U_1, ..., U_K.

    Attributes:
        bases: The bases in mode order; bases[k - 1] belongs to mode k.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bases: List[OrthoBasis] = Field(..., min_length=1, description="The per-mode bases, in mode order")

    @property
    def order(self) -> int:
        """The number of modes K."""
        return len(self.bases)

    @property
    def dims(self) -> Tuple[int, ...]:
        """The ambient dimensions (d_1, ..., d_K)."""
        return tuple(b.dim for b in self.bases)

    @property
    def ranks(self) -> Tuple[int, ...]:
        """The ranks (r_1, ..., r_K)."""
        return tuple(b.rank for b in self.bases)

    def mode(self, k: int) -> OrthoBasis:
        """The basis of a 1-based mode.

        Args:
            k (int): The mode, 1 <= k <= K.

        Returns:
            OrthoBasis: U_k.
        """
        return self.bases[check_mode(k, self.order)]

    def projectors(self) -> List[np.ndarray]:
        """The projection matrices U_k U_k^T, in mode order.

        Returns:
            List[np.ndarray]: One d_k x d_k matrix per mode.
        """
        return [b.cols @ b.cols.T for b in self.bases]
