"""Configuration of the iterative projection estimator, and the named method presets.

Preset naming follows the usual conventions for these procedures:
    - `X` (UP, TIPUP, TOPUP): initialization only, zero sweeps
    - `1X`: one sweep after initialization
    - `iX`: sweep until the tolerance (or the iteration cap) is reached
    - `A-1B` / `A-iB`: A as initializer, B as iterator
"""

import math

import numpy as np
from beartype.typing import Dict, List, Optional, Sequence
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import RankError, UnknownPresetError
from ..estimators.diagnostics import Normalization
from ..estimators.moments import Flavor

DEFAULT_EPSILON = 1e-4
MIN_DEFAULT_SWEEPS = 10


class MethodPreset(BaseModel):
    """A named IterConfig fragment choosing the initializer, the iterator, and the sweep count.

    Attributes:
        name: The preset name, e.g. "TIPUP-iTOPUP".
        uinit: The initializer flavor.
        uiter: The iterator flavor.
        max_iter: The sweep cap; 0 for init-only, None for the default cap.
        epsilon: Tolerance override; one-step presets use 0.
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="The preset name")
    uinit: Flavor = Field(..., description="The initializer flavor")
    uiter: Flavor = Field(..., description="The iterator flavor")
    max_iter: Optional[int] = Field(None, ge=0, description="The sweep cap; 0 for init-only, None for the default")
    epsilon: Optional[float] = Field(None, ge=0, description="Tolerance override; one-step presets use 0")

    @property
    def iterative(self) -> bool:
        """Whether the preset runs at least one sweep."""
        return self.max_iter != 0


def _build_presets() -> Dict[str, MethodPreset]:
    presets: Dict[str, MethodPreset] = {}
    for flavor in Flavor:
        name = flavor.value
        presets[name] = MethodPreset(name=name, uinit=flavor, uiter=flavor, max_iter=0)
        presets[f"1{name}"] = MethodPreset(name=f"1{name}", uinit=flavor, uiter=flavor, max_iter=1, epsilon=0.0)
        presets[f"i{name}"] = MethodPreset(name=f"i{name}", uinit=flavor, uiter=flavor)

    for init, step in ((Flavor.TIPUP, Flavor.TOPUP), (Flavor.TOPUP, Flavor.TIPUP)):
        one = f"{init.value}-1{step.value}"
        full = f"{init.value}-i{step.value}"
        presets[one] = MethodPreset(name=one, uinit=init, uiter=step, max_iter=1, epsilon=0.0)
        presets[full] = MethodPreset(name=full, uinit=init, uiter=step)

    return presets


PRESETS: Dict[str, MethodPreset] = _build_presets()
_PRESETS_FOLDED: Dict[str, MethodPreset] = {name.lower(): p for name, p in PRESETS.items()}


def method_preset(name: str) -> MethodPreset:
    """Look up a method preset by name (case-insensitive).

    Args:
        name (str): One of UP, 1UP, iUP, TIPUP, 1TIPUP, iTIPUP, TOPUP, 1TOPUP, iTOPUP, TIPUP-1TOPUP, TIPUP-iTOPUP,
            TOPUP-1TIPUP, TOPUP-iTIPUP.

    Raises:
        UnknownPresetError: If the name is not a known preset.

    Returns:
        MethodPreset: The preset.
    """
    preset = _PRESETS_FOLDED.get(name.strip().lower())
    if preset is None:
        raise UnknownPresetError(f"Unknown method preset {name!r}; known presets: {', '.join(PRESETS)}")
    return preset


def default_max_iter(dims: Sequence[int]) -> int:
    """Default sweep cap, max(10, ceil(log d)) with d the total dimension.

    Args:
        dims (Sequence[int]): The dimension vector.

    Returns:
        int: The cap.
    """
    return max(MIN_DEFAULT_SWEEPS, math.ceil(math.log(int(np.prod(dims)))))


class IterConfig(BaseModel):
    """Configuration of the generic iterative projection estimator.

    Attributes:
        ranks: The ranks (r_1, ..., r_K).
        h0_init: Lag count of the initializer.
        h0_iter: Lag count of the iterator.
        uinit: The initializer flavor.
        uiter: The iterator flavor.
        epsilon: Stop once every mode's projector moves by at most this much; 0 disables early stopping.
        max_iter: The maximum number of sweeps J; 0 for init only, None for max(10, ceil(log d)).
        record_trajectory: Keep per-sweep bases and per-mode changes.
        normalization: Normalization of the reported signal strengths.
        method: The preset name this config came from, if any.
    """

    model_config = ConfigDict(frozen=True)

    ranks: List[int] = Field(..., min_length=1, description="The ranks (r_1, ..., r_K)")
    h0_init: int = Field(1, ge=1, description="Lag count of the initializer")
    h0_iter: int = Field(1, ge=1, description="Lag count of the iterator")
    uinit: Flavor = Field(Flavor.TOPUP, description="The initializer flavor")
    uiter: Flavor = Field(Flavor.TOPUP, description="The iterator flavor")
    epsilon: float = Field(DEFAULT_EPSILON, ge=0, description="Convergence tolerance on the projector change")
    max_iter: Optional[int] = Field(None, ge=0, description="The maximum number of sweeps J")
    record_trajectory: bool = Field(False, description="Keep per-sweep bases and per-mode changes")
    normalization: Normalization = Field(Normalization.FIGURE, description="Normalization of signal strengths")
    method: Optional[str] = Field(None, description="The preset name this config came from")

    @field_validator("ranks")
    @classmethod
    def _positive_ranks(cls, ranks: List[int]) -> List[int]:
        if any(r < 1 for r in ranks):
            raise ValueError(f"Ranks must be positive, got {ranks}")
        return ranks

    @classmethod
    def from_preset(
        cls, name: str, ranks: Sequence[int], h0: int = 1, h0_iter: Optional[int] = None, **overrides: object
    ) -> "IterConfig":
        """Build a config from a method preset.

        Args:
            name (str): The preset name.
            ranks (Sequence[int]): The ranks (r_1, ..., r_K).
            h0 (int, optional): The initializer lag count (and the iterator's, unless h0_iter is given). Defaults to 1.
            h0_iter (Optional[int], optional): The iterator lag count. Defaults to None.
            **overrides (object): Any further IterConfig fields; epsilon and max_iter only apply where
                the preset leaves them open.

        Raises:
            UnknownPresetError: If the preset name is unknown.

        Returns:
            IterConfig: The config.
        """
        preset = method_preset(name)
        fields: Dict[str, object] = {
            "ranks": list(ranks),
            "h0_init": h0,
            "h0_iter": h0 if h0_iter is None else h0_iter,
            "uinit": preset.uinit,
            "uiter": preset.uiter,
            "method": preset.name,
        }
        if preset.max_iter is not None:
            fields["max_iter"] = preset.max_iter
        if preset.epsilon is not None:
            fields["epsilon"] = preset.epsilon
        # Explicit overrides never turn a fixed-sweep preset into another kind of method
        for key, value in overrides.items():
            if value is None:
                continue
            if key in ("max_iter", "epsilon") and getattr(preset, key) is not None:
                continue
            fields[key] = value
        return cls(**fields)

    def resolved_max_iter(self, dims: Sequence[int]) -> int:
        """The sweep cap J for data of the given shape.

        Args:
            dims (Sequence[int]): The dimension vector.

        Returns:
            int: max_iter, or the default cap when unset.
        """
        return default_max_iter(dims) if self.max_iter is None else self.max_iter

    def check_shape(self, dims: Sequence[int]) -> None:
        """Validate the ranks against a dimension vector.

        Args:
            dims (Sequence[int]): The dimension vector.

        Raises:
            RankError: If the ranks do not fit the dimensions.
        """
        if len(self.ranks) != len(dims):
            raise RankError(f"Got {len(self.ranks)} ranks for an order-{len(dims)} series")
        for k, (r, d) in enumerate(zip(self.ranks, dims), start=1):
            if r > d:
                raise RankError(f"Rank r_{k}={r} exceeds d_{k}={d}")
