"""Pydantic models describing a simulated tensor factor model and the data drawn from it.

The model is
    X_t = lambda * F_t ×_1 U_1 ... ×_K U_K + sigma * Z_t ×_1 Psi_1^{1/2} ... ×_K Psi_K^{1/2},
with independent AR(1) entries in the core F_t, orthonormal loadings U_k, iid standard normal Z_t and equicorrelated
mode covariances Psi_k = (1 - rho_k) I + rho_k 11^T.
"""

from enum import Enum, unique

import numpy as np
from beartype.typing import List, Optional, Tuple, Union
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import UnknownPresetError
from ..spectral.basis import LoadingSet
from ..tensor.core import TensorSeries

DEFAULT_RHO = 0.2
DEFAULT_BURN_IN = 200
DEFAULT_DIMS = (16, 16)


@unique
class Setting(Enum):
    """The three reference simulation settings, all with d = (16, 16)."""

    I = "I"  # noqa: E741
    II = "II"
    III = "III"

    @classmethod
    def parse(cls, value: Union[str, "Setting"]) -> "Setting":
        """Parse a setting from its name ("I", "ii") or its number ("3").

        Args:
            value (Union[str, Setting]): The setting.

        Raises:
            UnknownPresetError: If the value names no setting.

        Returns:
            Setting: The setting.
        """
        if isinstance(value, Setting):
            return value
        text = str(value).strip().upper()
        text = {"1": "I", "2": "II", "3": "III"}.get(text, text)
        try:
            return cls(text)
        except ValueError:
            raise UnknownPresetError(f"Unknown simulation setting {value!r}; expected one of I, II, III") from None


class ModelSpec(BaseModel):
    """Parameters of a simulated tensor factor model.

    Attributes:
        dims: The observation dimensions (d_1, ..., d_K).
        ranks: The core dimensions (r_1, ..., r_K).
        lambda_: The signal scale lambda (alias "lambda").
        ar_coeffs: AR(1) coefficients of the core entries, flattened column-major; a single value is broadcast.
        noise_rho: Equicorrelation rho_k per mode; a single value is broadcast.
        noise_scale: The noise standard deviation sigma; 0 gives noiseless data.
        seed: The master seed.
        burn_in: AR warm-up steps discarded before the first observation.
        T: Default series length.
        setting: The reference setting this spec came from, if any.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    dims: List[int] = Field(..., min_length=1, max_length=4, description="The observation dimensions")
    ranks: List[int] = Field(..., min_length=1, max_length=4, description="The core dimensions")
    lambda_: float = Field(1.0, alias="lambda", ge=0, description="The signal scale")
    ar_coeffs: List[float] = Field([0.8], min_length=1, description="Column-major AR(1) coefficients of the core")
    noise_rho: List[float] = Field([DEFAULT_RHO], min_length=1, description="Equicorrelation of the noise per mode")
    noise_scale: float = Field(1.0, ge=0, description="The noise standard deviation")
    seed: int = Field(0, ge=0, description="The master seed")
    burn_in: int = Field(DEFAULT_BURN_IN, ge=0, description="AR warm-up steps")
    T: int = Field(256, ge=2, description="Default series length")
    setting: Optional[Setting] = Field(None, description="The reference setting, if any")

    @model_validator(mode="after")
    def _check_model(self) -> "ModelSpec":
        if len(self.dims) != len(self.ranks):
            raise ValueError(f"dims {self.dims} and ranks {self.ranks} must have the same length")
        for k, (r, d) in enumerate(zip(self.ranks, self.dims), start=1):
            if not 1 <= r <= d:
                raise ValueError(f"Need 1 <= r_{k} <= d_{k}, got r_{k}={r}, d_{k}={d}")
        if len(self.ar_coeffs) not in (1, int(np.prod(self.ranks))):
            raise ValueError(f"Expected 1 or {int(np.prod(self.ranks))} AR coefficients, got {len(self.ar_coeffs)}")
        if any(not abs(phi) < 1 for phi in self.ar_coeffs):
            raise ValueError(f"AR coefficients must satisfy |phi| < 1, got {self.ar_coeffs}")
        if len(self.noise_rho) not in (1, len(self.dims)):
            raise ValueError(f"Expected 1 or {len(self.dims)} noise correlations, got {len(self.noise_rho)}")
        if any(not 0 <= rho < 1 for rho in self.noise_rho):
            raise ValueError(f"Noise correlations must satisfy 0 <= rho < 1, got {self.noise_rho}")
        return self

    @property
    def order(self) -> int:
        """The tensor order K."""
        return len(self.dims)

    @property
    def phis(self) -> np.ndarray:
        """The AR coefficients of every core entry, flattened column-major."""
        return np.broadcast_to(np.asarray(self.ar_coeffs, dtype=np.float64), (int(np.prod(self.ranks)),)).copy()

    @property
    def rhos(self) -> Tuple[float, ...]:
        """The noise equicorrelation of every mode."""
        return tuple(np.broadcast_to(np.asarray(self.noise_rho), (self.order,)).tolist())


class GroundTruth(BaseModel):
    """A simulated data set with every latent component kept.

    Attributes:
        spec: The model it was drawn from.
        replication: The replication index it was drawn for.
        loadings: The true loading bases U_k.
        factor_series: The core series F_t.
        noise_series: The noise series E_t.
        signal_series: The signal series lambda * F_t ×_k U_k.
        observed_series: signal + noise.
    """

    model_config = ConfigDict(frozen=True)

    spec: ModelSpec = Field(..., description="The model it was drawn from")
    replication: int = Field(0, ge=0, description="The replication index")
    loadings: LoadingSet = Field(..., description="The true loading bases")
    factor_series: TensorSeries = Field(..., description="The core series F_t")
    noise_series: TensorSeries = Field(..., description="The noise series E_t")
    signal_series: TensorSeries = Field(..., description="The signal series")
    observed_series: TensorSeries = Field(..., description="The observed series X_t")


def preset(
    setting: Union[str, Setting],
    lambda_: float = 1.0,
    T: int = 256,
    seed: int = 0,
    dims: Tuple[int, ...] = DEFAULT_DIMS,
    noise_rho: float = DEFAULT_RHO,
    noise_scale: float = 1.0,
) -> ModelSpec:
    """Build the ModelSpec of a reference simulation setting.

    Args:
        setting (Union[str, Setting]): I (r = (1, 1), phi = 0.8), II (r = (1, 2), phi = (0.8, 0.6)) or III
            (r = (1, 2), phi = (0.8, -0.8)).
        lambda_ (float, optional): The signal scale. Defaults to 1.0.
        T (int, optional): The series length. Defaults to 256.
        seed (int, optional): The master seed. Defaults to 0.
        dims (Tuple[int, ...], optional): The observation dimensions. Defaults to (16, 16).
        noise_rho (float, optional): The noise equicorrelation. Defaults to 0.2.
        noise_scale (float, optional): The noise standard deviation. Defaults to 1.0.

    Raises:
        UnknownPresetError: If the setting is unknown.

    Returns:
        ModelSpec: The spec.
    """
    setting = Setting.parse(setting)
    ranks, phis = {
        Setting.I: ([1, 1], [0.8]),
        Setting.II: ([1, 2], [0.8, 0.6]),
        Setting.III: ([1, 2], [0.8, -0.8]),
    }[setting]
    return ModelSpec(
        dims=list(dims),
        ranks=ranks,
        lambda_=lambda_,
        ar_coeffs=phis,
        noise_rho=[noise_rho],
        noise_scale=noise_scale,
        seed=seed,
        T=T,
        setting=setting,
    )
