"""Draw simulated tensor time series from a ModelSpec.

Every draw is determined by (spec.seed, replication): the seed sequence SeedSequence(seed, spawn_key=(replication,))
is spawned into three independent streams, one each for the loadings, the factors and the noise. Changing T or lambda
therefore keeps the loadings and the innovations of a replication fixed.
"""

import logging

import numpy as np
import scipy.linalg
import scipy.signal
from beartype.typing import List, Optional, Sequence, Tuple

from ..spectral.basis import LoadingSet, OrthoBasis
from ..tensor.core import TensorSeries
from .models import GroundTruth, ModelSpec

logger = logging.getLogger(__name__)


def replication_rngs(seed: int, replication: int = 0) -> Tuple[np.random.Generator, ...]:
    """The (loadings, factors, noise) generators of a replication.

    Args:
        seed (int): The master seed.
        replication (int, optional): The replication index. Defaults to 0.

    Returns:
        Tuple[np.random.Generator, ...]: Three independent generators.
    """
    children = np.random.SeedSequence(seed, spawn_key=(replication,)).spawn(3)
    return tuple(np.random.default_rng(child) for child in children)


def equicorrelation_sqrt(d: int, rho: float) -> np.ndarray:
    """Symmetric square root of Psi = (1 - rho) I + rho 11^T, in closed form aI + b11^T.

    Args:
        d (int): The dimension.
        rho (float): The equicorrelation, 0 <= rho < 1.

    Returns:
        np.ndarray: The d x d matrix S with S @ S == Psi.
    """
    a = np.sqrt(1 - rho)
    b = (np.sqrt(1 - rho + d * rho) - a) / d
    return a * np.eye(d) + b * np.ones((d, d))


def random_loadings(rng: np.random.Generator, dims: Sequence[int], ranks: Sequence[int]) -> LoadingSet:
    """Orthonormalize standard normal d_k x r_k draws through QR.

    Args:
        rng (np.random.Generator): The loadings stream.
        dims (Sequence[int]): The dimensions.
        ranks (Sequence[int]): The ranks.

    Returns:
        LoadingSet: The loading bases.
    """
    bases: List[OrthoBasis] = []
    for d, r in zip(dims, ranks):
        q, upper = scipy.linalg.qr(rng.standard_normal((d, r)), mode="economic")
        bases.append(OrthoBasis(cols=q * np.where(np.diag(upper) < 0, -1.0, 1.0)))
    return LoadingSet(bases=bases)


def ar1_paths(rng: np.random.Generator, phis: np.ndarray, T: int, burn_in: int) -> np.ndarray:
    """Independent AR(1) paths f_t = phi f_{t-1} + e_t with N(0, 1) innovations.

    Each path starts from its stationary law N(0, 1 / (1 - phi^2)) and is burned in before being kept.

    Args:
        rng (np.random.Generator): The factor stream.
        phis (np.ndarray): One coefficient per path.
        T (int): The number of kept steps.
        burn_in (int): The number of discarded steps.

    Returns:
        np.ndarray: A (T, len(phis)) array.
    """
    start = rng.standard_normal(phis.size) / np.sqrt(1 - phis**2)
    innovations = rng.standard_normal((T + burn_in, phis.size))
    paths = np.empty_like(innovations)
    for j, phi in enumerate(phis):
        paths[:, j], _ = scipy.signal.lfilter([1.0], [1.0, -phi], innovations[:, j], zi=[phi * start[j]])
    return paths[burn_in:]


def _multiply_modes(values: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    for axis, m in enumerate(matrices):
        values = np.moveaxis(np.tensordot(m, values, axes=(1, axis + 1)), 0, axis + 1)
    return values


def generate(spec: ModelSpec, T: Optional[int] = None, replication: int = 0) -> GroundTruth:
    """Draw one data set from a tensor factor model.

    Args:
        spec (ModelSpec): The model.
        T (Optional[int], optional): The series length; spec.T when None. Defaults to None.
        replication (int, optional): The replication index selecting the random streams. Defaults to 0.

    Raises:
        ValueError: If T < 2.

    Returns:
        GroundTruth: The loadings, every latent series and the observed series.
    """
    T = spec.T if T is None else T
    if T < 2:
        raise ValueError(f"Need T >= 2 observations, got {T}")
    loading_rng, factor_rng, noise_rng = replication_rngs(spec.seed, replication)

    loadings = random_loadings(loading_rng, spec.dims, spec.ranks)

    paths = ar1_paths(factor_rng, spec.phis, T, spec.burn_in)
    factors = np.moveaxis(paths.T.reshape((*spec.ranks, T), order="F"), -1, 0)

    z = noise_rng.standard_normal((T, *spec.dims))
    noise = spec.noise_scale * _multiply_modes(
        z, [equicorrelation_sqrt(d, rho) for d, rho in zip(spec.dims, spec.rhos)]
    )
    signal = spec.lambda_ * _multiply_modes(factors, [b.cols for b in loadings.bases])

    logger.debug(f"Generated replication {replication} of shape {tuple(spec.dims)} with T={T}")
    return GroundTruth(
        spec=spec,
        replication=replication,
        loadings=loadings,
        factor_series=TensorSeries(values=factors),
        noise_series=TensorSeries(values=noise),
        signal_series=TensorSeries(values=signal),
        observed_series=TensorSeries(values=signal + noise),
    )
