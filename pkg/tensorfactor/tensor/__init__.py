"""Dense tensor containers and multilinear algebra for tensorfactor.

Classes:
    DenseTensor: An order-K real tensor with an explicit dimension vector.
    TensorSeries: A time-ordered series of same-shape tensors.

Functions:
    unfold, refold, mode_product, outer_product, hs_norm: The multilinear algebra primitives.
    unfold_series, series_mode_product: The same primitives applied to every item of a series.
    read_series, write_series: The binary / CSV tensor container.
"""

from .core import (
    DenseTensor,
    TensorSeries,
    check_mode,
    hs_norm,
    mode_product,
    outer_product,
    refold,
    series_mode_product,
    unfold,
    unfold_array,
    unfold_series,
)
from .io import read_series, write_series
