"""Empirical signal-strength diagnostics for the TOPUP and TIPUP moment matrices.

The signal strength of a mode is read off the r_k-th singular value tau of its moment matrix. Two normalizations are
reported: `paper_eq` gives tau / sqrt(h0), and `figure` gives tau / h0. The `figure` normalization is the
default; it gives the population values quoted for the reference simulation settings.
"""

import logging
from enum import Enum, unique

import numpy as np
import scipy.linalg
from beartype.typing import List, Sequence
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import RankError
from ..spectral.decompositions import GRAM_ROUTE_RATIO
from ..tensor.core import TensorSeries, check_mode
from .moments import check_lag, lag0_tipup, tipup_matrix, topup_gram, topup_unfolding

logger = logging.getLogger(__name__)

SPECTRUM_LENGTH = 4


@unique
class Normalization(Enum):
    """How the r_k-th singular value tau of a moment matrix is turned into a squared signal strength."""

    PAPER_EQ = "paper_eq"
    FIGURE = "figure"

    def apply(self, tau: float, h0: int) -> float:
        """Normalize a singular value by the lag count.

        Args:
            tau (float): The r_k-th singular value.
            h0 (int): The number of lags it accumulates.

        Returns:
            float: tau / sqrt(h0) for PAPER_EQ, tau / h0 for FIGURE.
        """
        if self == Normalization.PAPER_EQ:
            return tau / np.sqrt(h0)
        return tau / h0


class ModeSignal(BaseModel):
    """Signal strength of a single mode, in both flavors.

    Attributes:
        lambda_sq: The normalized r_k-th singular value of the TOPUP unfolding.
        lambda_star_sq: The normalized r_k-th singular value of the TIPUP matrix.
        topup_singular_values: The leading TOPUP singular values.
        tipup_singular_values: The leading TIPUP singular values.
        lag0_scale: The leading singular value of the lag-0 inner-product moment.
    """

    model_config = ConfigDict(frozen=True)

    lambda_sq: float = Field(..., ge=0)
    lambda_star_sq: float = Field(..., ge=0)
    topup_singular_values: List[float] = Field(...)
    tipup_singular_values: List[float] = Field(...)
    lag0_scale: float = Field(..., ge=0)


class SignalDiagnostics(BaseModel):
    """Per-mode signal strengths of a tensor series, estimated from its lagged moments.

    Attributes:
        h0: The number of lags the moments accumulate.
        normalization: How singular values were normalized.
        lambda_sq: lambda_k^2 per mode, from the TOPUP unfolding.
        lambda_star_sq: lambda*_k^2 per mode, from the TIPUP matrix.
        topup_singular_values: The leading TOPUP spectrum per mode.
        tipup_singular_values: The leading TIPUP spectrum per mode.
        lag0_scale: The leading singular value of the lag-0 TIPUP moment per mode.
    """

    model_config = ConfigDict(frozen=True)

    h0: int = Field(..., ge=1, description="The number of lags the moments accumulate")
    normalization: Normalization = Field(Normalization.FIGURE, description="How singular values were normalized")

    lambda_sq: List[float] = Field(..., description="lambda_k^2 per mode, from the TOPUP unfolding")
    lambda_star_sq: List[float] = Field(..., description="lambda*_k^2 per mode, from the TIPUP matrix")
    topup_singular_values: List[List[float]] = Field(..., description="The leading TOPUP spectrum per mode")
    tipup_singular_values: List[List[float]] = Field(..., description="The leading TIPUP spectrum per mode")
    lag0_scale: List[float] = Field(..., description="The leading singular value of the lag-0 TIPUP moment per mode")

    @field_validator("lambda_sq", "lambda_star_sq", "lag0_scale")
    @classmethod
    def _nonnegative_finite(cls, values: List[float]) -> List[float]:
        if not all(np.isfinite(v) and v >= 0 for v in values):
            raise ValueError(f"Signal strengths must be nonnegative and finite, got {values}")
        return values

    @classmethod
    def from_modes(cls, modes: Sequence[ModeSignal], h0: int, normalization: Normalization) -> "SignalDiagnostics":
        """Collect per-mode signals into one diagnostics record.

        Args:
            modes (Sequence[ModeSignal]): One entry per mode, in mode order.
            h0 (int): The lag count used.
            normalization (Normalization): The normalization used.

        Returns:
            SignalDiagnostics: The diagnostics.
        """
        return cls(
            h0=h0,
            normalization=normalization,
            lambda_sq=[m.lambda_sq for m in modes],
            lambda_star_sq=[m.lambda_star_sq for m in modes],
            topup_singular_values=[m.topup_singular_values for m in modes],
            tipup_singular_values=[m.tipup_singular_values for m in modes],
            lag0_scale=[m.lag0_scale for m in modes],
        )

    def weak_modes(self, ratio: float = 0.1) -> List[int]:
        """Modes whose TIPUP signal is negligible next to the contemporaneous (lag-0) moment.

        Args:
            ratio (float, optional): Flag a mode when lambda*_k^2 < ratio * lag0_scale. Defaults to 0.1.

        Returns:
            List[int]: The flagged 1-based modes.
        """
        return [k + 1 for k, (s, scale) in enumerate(zip(self.lambda_star_sq, self.lag0_scale)) if s < ratio * scale]


def _spectrum(m: np.ndarray) -> np.ndarray:
    if m.shape[1] > GRAM_ROUTE_RATIO * m.shape[0]:
        w = scipy.linalg.eigvalsh(m @ m.T)[::-1]
        return np.sqrt(np.clip(w, 0.0, None))
    return scipy.linalg.svdvals(m)


def _topup_spectrum(series: TensorSeries, k: int, h0: int) -> np.ndarray:
    d_k = series.shape[k - 1]
    d_rest = int(np.prod(series.shape)) // d_k
    if d_rest * d_rest * h0 > GRAM_ROUTE_RATIO * d_k:
        w = scipy.linalg.eigvalsh(topup_gram(series, k, h0))[::-1]
        return np.sqrt(np.clip(w, 0.0, None))
    return scipy.linalg.svdvals(topup_unfolding(series, k, h0))


def _rth(values: np.ndarray, rank: int) -> float:
    return float(values[rank - 1]) if rank <= values.size else 0.0


def mode_signal(
    series: TensorSeries, k: int, rank: int, h0: int = 1, normalization: Normalization = Normalization.FIGURE
) -> ModeSignal:
    """Signal strength of one mode of a series, from both its TOPUP and its TIPUP moments.

    Args:
        series (TensorSeries): The series.
        k (int): The 1-based mode.
        rank (int): The mode-k rank r_k.
        h0 (int, optional): The number of lags. Defaults to 1.
        normalization (Normalization, optional): Singular value normalization. Defaults to Normalization.FIGURE.

    Raises:
        RankError: If rank is not in 1..d_k.

    Returns:
        ModeSignal: The strengths and leading spectra.
    """
    axis = check_mode(k, series.order)
    check_lag(series, h0)
    if not 1 <= rank <= series.shape[axis]:
        raise RankError(f"Rank {rank} is not in 1..{series.shape[axis]} for mode {k}")

    topup = _topup_spectrum(series, k, h0)
    tipup = _spectrum(tipup_matrix(series, k, h0))
    lag0 = scipy.linalg.eigvalsh(lag0_tipup(series, k))

    keep = max(SPECTRUM_LENGTH, rank + 1)
    return ModeSignal(
        lambda_sq=normalization.apply(_rth(topup, rank), h0),
        lambda_star_sq=normalization.apply(_rth(tipup, rank), h0),
        topup_singular_values=[float(v) for v in topup[:keep]],
        tipup_singular_values=[float(v) for v in tipup[:keep]],
        lag0_scale=float(max(lag0[-1], 0.0)),
    )


def signal_strength(
    series: TensorSeries,
    ranks: Sequence[int],
    h0: int = 1,
    normalization: Normalization = Normalization.FIGURE,
) -> SignalDiagnostics:
    """Empirical signal strengths lambda_k^2 (TOPUP) and lambda*_k^2 (TIPUP) for every mode of a series.

    Args:
        series (TensorSeries): The series.
        ranks (Sequence[int]): The ranks (r_1, ..., r_K).
        h0 (int, optional): The number of lags. Defaults to 1.
        normalization (Normalization, optional): Singular value normalization. Defaults to Normalization.FIGURE.

    Raises:
        RankError: If the number of ranks does not match the series order.

    Returns:
        SignalDiagnostics: The diagnostics; an all-zero series gives all-zero strengths.
    """
    if len(ranks) != series.order:
        raise RankError(f"Expected {series.order} ranks for an order-{series.order} series, got {len(ranks)}")

    modes: List[ModeSignal] = [
        mode_signal(series, k, int(r), h0, normalization) for k, r in enumerate(ranks, start=1)
    ]
    return SignalDiagnostics.from_modes(modes, h0, normalization)
