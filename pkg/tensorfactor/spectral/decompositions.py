"""Truncated singular-vector extraction, projectors, and the subspace distance between loading spaces.

Sign convention:
    Every returned singular vector / eigenvector is flipped so that its largest-magnitude entry is positive. This
    fixes the sign indeterminacy so exported loadings are reproducible; column spaces are unaffected.

Note:
    When the rank-th and (rank+1)-th singular values tie, any leading invariant subspace is a valid answer.
    Compare projectors, never raw bases.
"""

import logging

import numpy as np
import scipy.linalg
from beartype import beartype
from beartype.typing import Tuple

from ..errors import NonFiniteError, NotSymmetricError, RankError, TensorShapeError
from .basis import OrthoBasis

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9
NEGATIVE_EIGEN_TOL = 1e-8
GRAM_ROUTE_RATIO = 4


def _fix_signs(u: np.ndarray) -> np.ndarray:
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivots, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def _check_rank(rank: int, limit: int, what: str) -> None:
    if rank < 1 or rank > limit:
        raise RankError(f"Rank {rank} is not in 1..{limit} for {what}")


def truncated_svd(m: np.ndarray, rank: int) -> Tuple[OrthoBasis, np.ndarray]:
    """Leading left singular vectors together with the full singular spectrum.

    Args:
        m (np.ndarray): A real matrix.
        rank (int): The number of leading left singular vectors to keep.

    Raises:
        TensorShapeError: If m is not a matrix.
        NonFiniteError: If m holds NaN or inf.

    Returns:
        Tuple[OrthoBasis, np.ndarray]:
            * OrthoBasis: The leading `rank` left singular vectors, by descending singular value
            * np.ndarray: All singular values, descending
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise TensorShapeError(f"Expected a matrix, got an array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("Cannot take the SVD of a matrix with non-finite entries")
    _check_rank(rank, min(m.shape), f"a {m.shape[0]} x {m.shape[1]} matrix")

    u, s, _ = scipy.linalg.svd(m, full_matrices=False)
    return OrthoBasis(cols=_fix_signs(u[:, :rank])), s


def gram_eigh(gram: np.ndarray, rank: int) -> Tuple[OrthoBasis, np.ndarray]:
    """Leading eigenvectors of a symmetric PSD matrix together with its eigenvalues.

    Args:
        gram (np.ndarray): A symmetric positive semi-definite d x d matrix.
        rank (int): The number of leading eigenvectors to keep.

    Raises:
        TensorShapeError: If gram is not square.
        NonFiniteError: If gram holds NaN or inf.
        NotSymmetricError: If gram is asymmetric or has a materially negative eigenvalue.

    Returns:
        Tuple[OrthoBasis, np.ndarray]:
            * OrthoBasis: The leading `rank` eigenvectors, by descending eigenvalue
            * np.ndarray: All eigenvalues, descending
    """
    gram = np.asarray(gram, dtype=np.float64)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise TensorShapeError(f"Expected a square matrix, got shape {gram.shape}")
    if not np.all(np.isfinite(gram)):
        raise NonFiniteError("Cannot eigendecompose a matrix with non-finite entries")
    _check_rank(rank, gram.shape[0], f"a {gram.shape[0]} x {gram.shape[0]} gram matrix")

    # Tolerances are relative to the matrix scale
    scale = max(1.0, float(np.abs(gram).max()))
    if np.abs(gram - gram.T).max() > SYMMETRY_TOL * scale:
        raise NotSymmetricError("Gram matrix is not symmetric")

    w, v = scipy.linalg.eigh(gram)
    w, v = w[::-1], v[:, ::-1]
    if w[-1] < -NEGATIVE_EIGEN_TOL * scale:
        raise NotSymmetricError(f"Gram matrix has a negative eigenvalue {w[-1]:.3e}; it is not PSD")

    return OrthoBasis(cols=_fix_signs(v[:, :rank])), w


@beartype
def lsvd(m: np.ndarray, rank: int) -> OrthoBasis:
    """LSVD_rank: the leading left singular vectors of a matrix.

    Args:
        m (np.ndarray): A real matrix.
        rank (int): 1 <= rank <= min(m.shape).

    Returns:
        OrthoBasis: The leading `rank` left singular vectors, by descending singular value.
    """
    return truncated_svd(m, rank)[0]


@beartype
def gram_lsvd(gram: np.ndarray, rank: int) -> OrthoBasis:
    """LSVD through the eigendecomposition of M M^T, without ever forming M.

    Args:
        gram (np.ndarray): The symmetric PSD matrix M M^T.
        rank (int): 1 <= rank <= d.

    Returns:
        OrthoBasis: The leading `rank` eigenvectors, which span the same space as lsvd(M, rank).
    """
    return gram_eigh(gram, rank)[0]


def left_basis(m: np.ndarray, rank: int) -> Tuple[OrthoBasis, np.ndarray]:
    """Leading left singular vectors and singular values, through the gram matrix when m is wide.

    The gram route is taken whenever the number of columns exceeds GRAM_ROUTE_RATIO times the number of rows.

    Args:
        m (np.ndarray): A real matrix.
        rank (int): The number of leading vectors to keep.

    Returns:
        Tuple[OrthoBasis, np.ndarray]:
            * OrthoBasis: The leading left singular vectors
            * np.ndarray: The singular values, descending (min(m.shape) of them)
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 2 and m.shape[1] > GRAM_ROUTE_RATIO * m.shape[0]:
        _check_rank(rank, min(m.shape), f"a {m.shape[0]} x {m.shape[1]} matrix")
        basis, w = gram_eigh(m @ m.T, rank)
        return basis, np.sqrt(np.clip(w, 0.0, None))
    return truncated_svd(m, rank)


@beartype
def projector(u: OrthoBasis) -> np.ndarray:
    """The orthogonal projector onto the column space of a basis.

    Args:
        u (OrthoBasis): The basis U.

    Returns:
        np.ndarray: P = U U^T, symmetric and idempotent with trace equal to the rank.
    """
    return u.cols @ u.cols.T


@beartype
def subspace_distance(u1: OrthoBasis, u2: OrthoBasis) -> float:
    """Sine of the largest principal angle between two column spaces of equal rank.

    This equals the spectral norm ||U_1 U_1^T - U_2 U_2^T||_S and sqrt(1 - sigma_min(U_1^T U_2)^2). It is evaluated
    as the spectral norm of the residual (I - U_1 U_1^T) U_2, which keeps full relative accuracy for small angles.

    Args:
        u1 (OrthoBasis): The first basis.
        u2 (OrthoBasis): The second basis.

    Raises:
        TensorShapeError: If the ambient dimensions differ.
        RankError: If the ranks differ.

    Returns:
        float: The distance, in [0, 1].
    """
    if u1.dim != u2.dim:
        raise TensorShapeError(f"Cannot compare bases of R^{u1.dim} and R^{u2.dim}")
    if u1.rank != u2.rank:
        raise RankError(f"Cannot compare bases of ranks {u1.rank} and {u2.rank}")

    residual = u2.cols - u1.cols @ (u1.cols.T @ u2.cols)
    largest = float(scipy.linalg.svdvals(residual)[0])
    return min(1.0, max(0.0, largest))
