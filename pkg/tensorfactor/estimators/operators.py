"""Loading operators: maps from a tensor time series to an estimate of one mode's loading space.

These are the UINIT / UITER operators plugged into the iterative engine. Each operator wraps one moment flavor.

Tip:
    To add another estimator of the loading spaces, subclass LoadingOperator and implement `leading`:
    - It receives the series, a 1-based mode k and the rank r_k
    - It returns the leading left basis together with the singular spectrum of the moment matrix it used
    - Rank and degeneracy checks are done for you by `estimate`
"""

import logging
from abc import ABC, abstractmethod

import numpy as np
from beartype.typing import ClassVar, Dict, Tuple, Type

from ..errors import DegenerateMomentError, RankError
from ..spectral.basis import OrthoBasis
from ..spectral.decompositions import GRAM_ROUTE_RATIO, gram_eigh, left_basis, truncated_svd
from ..tensor.core import TensorSeries, check_mode
from .moments import Flavor, MomentConfig, check_lag, tipup_matrix, topup_gram, topup_unfolding, up_unfolding

logger = logging.getLogger(__name__)

# relative to max|X|**MOMENT_DEGREE of the series
DEGENERATE_TOL = 1e-14


class LoadingOperator(ABC):
    """Abstract operator estimating a mode's loading space from a tensor time series.

    Args:
        h0 (int, optional): The number of lags the moment matrix accumulates. Defaults to 1.

    Attributes:
        FLAVOR: The moment flavor this operator implements.
        MOMENT_DEGREE: The degree of the moment entries in the data, so singular values scale as c**MOMENT_DEGREE
            when X is scaled by c.
        h0: The number of lags the moment matrix accumulates.
    """

    FLAVOR: ClassVar[Flavor]
    MOMENT_DEGREE: ClassVar[int] = 2

    def __init__(self, h0: int = 1) -> None:
        self.h0 = h0

    @abstractmethod
    def leading(self, series: TensorSeries, k: int, rank: int) -> Tuple[OrthoBasis, np.ndarray]:
        """Compute the leading left basis of this operator's moment matrix.

        Args:
            series (TensorSeries): The series.
            k (int): The 1-based mode.
            rank (int): The number of leading vectors.

        Returns:
            Tuple[OrthoBasis, np.ndarray]:
                * OrthoBasis: The leading left singular vectors
                * np.ndarray: The singular values of the moment matrix, descending
        """

    def estimate(self, series: TensorSeries, k: int, rank: int) -> OrthoBasis:
        """Estimate the mode-k loading space.

        Args:
            series (TensorSeries): The series.
            k (int): The 1-based mode.
            rank (int): The mode-k rank r_k, 1 <= r_k <= d_k.

        Raises:
            RankError: If rank is not in 1..d_k.
            DegenerateMomentError: If the moment matrix is numerically zero.

        Returns:
            OrthoBasis: A d_k x r_k orthonormal basis.
        """
        axis = check_mode(k, series.order)
        if not 1 <= rank <= series.shape[axis]:
            raise RankError(f"Rank {rank} is not in 1..{series.shape[axis]} for mode {k} of shape {series.shape}")

        basis, singular_values = self.leading(series, k, rank)
        scale = float(np.abs(series.values).max(initial=0.0)) ** self.MOMENT_DEGREE
        if singular_values.size == 0 or singular_values[0] <= DEGENERATE_TOL * scale:
            raise DegenerateMomentError(
                f"{self.FLAVOR.value} moment matrix of mode {k} is numerically zero; no loading directions to extract"
            )
        return basis


class TopupOperator(LoadingOperator):
    """TOPUP: leading left singular vectors of the mode-1 unfolding of the order-5 outer-product moment tensor.

    The order-5 tensor is only materialized when its unfolding is not much wider than tall; otherwise the gram
    identity of `topup_gram` is used.
    """

    FLAVOR = Flavor.TOPUP

    def leading(self, series: TensorSeries, k: int, rank: int) -> Tuple[OrthoBasis, np.ndarray]:
        """Leading left basis of the TOPUP unfolding.

        Args:
            series (TensorSeries): The series.
            k (int): The 1-based mode.
            rank (int): The number of leading vectors.

        Returns:
            Tuple[OrthoBasis, np.ndarray]: The basis and the singular values.
        """
        check_lag(series, self.h0)
        d_k = series.shape[k - 1]
        d_rest = int(np.prod(series.shape)) // d_k

        if d_rest * d_rest * self.h0 > GRAM_ROUTE_RATIO * d_k:
            basis, w = gram_eigh(topup_gram(series, k, self.h0), rank)
            return basis, np.sqrt(np.clip(w, 0.0, None))
        return truncated_svd(topup_unfolding(series, k, self.h0), rank)


class TipupOperator(LoadingOperator):
    """TIPUP: leading left singular vectors of the d_k x (d_k h0) inner-product moment matrix."""

    FLAVOR = Flavor.TIPUP

    def leading(self, series: TensorSeries, k: int, rank: int) -> Tuple[OrthoBasis, np.ndarray]:
        """Leading left basis of the TIPUP matrix.

        Args:
            series (TensorSeries): The series.
            k (int): The 1-based mode.
            rank (int): The number of leading vectors.

        Returns:
            Tuple[OrthoBasis, np.ndarray]: The basis and the singular values.
        """
        return left_basis(tipup_matrix(series, k, self.h0), rank)


class UpOperator(LoadingOperator):
    """UP: leading left singular vectors of the time-stacked unfolding, ignoring serial dependence."""

    FLAVOR = Flavor.UP
    MOMENT_DEGREE = 1

    def leading(self, series: TensorSeries, k: int, rank: int) -> Tuple[OrthoBasis, np.ndarray]:
        """Leading left basis of the UP unfolding.

        Args:
            series (TensorSeries): The series.
            k (int): The 1-based mode.
            rank (int): The number of leading vectors.

        Returns:
            Tuple[OrthoBasis, np.ndarray]: The basis and the singular values.
        """
        return left_basis(up_unfolding(series, k), rank)


OPERATORS: Dict[Flavor, Type[LoadingOperator]] = {
    Flavor.TOPUP: TopupOperator,
    Flavor.TIPUP: TipupOperator,
    Flavor.UP: UpOperator,
}


def make_operator(flavor: Flavor, h0: int = 1) -> LoadingOperator:
    """Instantiate the operator for a flavor.

    Args:
        flavor (Flavor): The moment flavor.
        h0 (int, optional): The number of lags. Defaults to 1.

    Returns:
        LoadingOperator: The operator.
    """
    return OPERATORS[flavor](h0=h0)


def estimate_loading(series: TensorSeries, k: int, rank: int, cfg: MomentConfig = MomentConfig()) -> OrthoBasis:
    """Estimate the mode-k loading space with one moment flavor (UTOPUP, UTIPUP or UP).

    Args:
        series (TensorSeries): The series.
        k (int): The 1-based mode.
        rank (int): The mode-k rank r_k.
        cfg (MomentConfig, optional): The flavor and lag count. Defaults to TOPUP with h0 = 1.

    Returns:
        OrthoBasis: A d_k x r_k orthonormal basis.
    """
    return make_operator(cfg.flavor, cfg.h0).estimate(series, k, rank)
