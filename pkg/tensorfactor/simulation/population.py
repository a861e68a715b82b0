"""Analytic population signal strengths of a simulated model.

The population lag-h auto-cross-moment of the signal is lambda^2 Sigma^F_h ×_k U_k ×_{k+K} U_k, where Sigma^F_h is
diagonal over the core entries with the AR(1) autocovariances gamma(h) = phi^h / (1 - phi^2). The loadings are
orthonormal, so the singular values of the TOPUP and TIPUP matrices can be read off the core-space moments directly.
"""

import logging

import numpy as np
import scipy.linalg
from beartype.typing import List

from ..estimators.diagnostics import Normalization
from ..estimators.moments import Flavor, autocov_tipup_matrix, autocov_topup_unfolding
from ..tensor.core import DenseTensor
from .models import ModelSpec

logger = logging.getLogger(__name__)


def ar1_autocovariance(phis: np.ndarray, h: int) -> np.ndarray:
    """Stationary lag-h autocovariances of unit-innovation AR(1) processes.

    Args:
        phis (np.ndarray): The coefficients, |phi| < 1.
        h (int): The lag.

    Raises:
        ValueError: If any |phi| >= 1.

    Returns:
        np.ndarray: gamma(h) = phi^h / (1 - phi^2), entrywise.
    """
    phis = np.asarray(phis, dtype=np.float64)
    if np.any(np.abs(phis) >= 1):
        raise ValueError(f"AR coefficients must satisfy |phi| < 1 for a stationary law, got {phis}")
    return phis**h / (1 - phis**2)


def population_moment(spec: ModelSpec, h: int) -> DenseTensor:
    """The population lag-h auto-cross-moment of the signal, in core coordinates.

    Args:
        spec (ModelSpec): The model.
        h (int): The lag.

    Returns:
        DenseTensor: The order-2K tensor with dims (r_1, ..., r_K, r_1, ..., r_K).
    """
    ranks = tuple(spec.ranks)
    diagonal = np.diag(spec.lambda_**2 * ar1_autocovariance(spec.phis, h))
    return DenseTensor(data=diagonal.reshape(ranks + ranks, order="F"))


def population_signal(
    spec: ModelSpec, h0: int = 1, flavor: Flavor = Flavor.TIPUP, normalization: Normalization = Normalization.FIGURE
) -> List[float]:
    """The population signal strength lambda_k^2 (TOPUP) or lambda*_k^2 (TIPUP) of every mode.

    Args:
        spec (ModelSpec): The model.
        h0 (int, optional): The number of lags. Defaults to 1.
        flavor (Flavor, optional): TOPUP or TIPUP. Defaults to Flavor.TIPUP.
        normalization (Normalization, optional): Singular value normalization. Defaults to Normalization.FIGURE.

    Raises:
        ValueError: If h0 < 1 or the flavor is UP.

    Returns:
        List[float]: One normalized r_k-th singular value per mode.
    """
    if h0 < 1:
        raise ValueError(f"Need h0 >= 1, got {h0}")
    if flavor == Flavor.UP:
        raise ValueError("UP ignores serial dependence and has no lagged signal strength")

    sigmas = [population_moment(spec, h) for h in range(1, h0 + 1)]
    build = autocov_topup_unfolding if flavor == Flavor.TOPUP else autocov_tipup_matrix

    strengths: List[float] = []
    for k, r in enumerate(spec.ranks, start=1):
        singular_values = scipy.linalg.svdvals(build(sigmas, k))
        tau = float(singular_values[r - 1]) if r <= singular_values.size else 0.0
        strengths.append(normalization.apply(tau, h0))
    return strengths
