"""Spectral primitives for tensorfactor.

Classes:
    OrthoBasis: A matrix with orthonormal columns, standing for a loading space.
    LoadingSet: One OrthoBasis per mode.

Functions:
    lsvd, gram_lsvd: Leading left singular vectors, directly or through the gram matrix.
    projector: The projection matrix of a basis.
    subspace_distance: The sine of the largest principal angle between two spaces.
"""

from .basis import LoadingSet, OrthoBasis
from .decompositions import (
    gram_eigh,
    gram_lsvd,
    left_basis,
    lsvd,
    projector,
    subspace_distance,
    truncated_svd,
)
