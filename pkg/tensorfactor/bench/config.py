"""Monte Carlo experiment configuration and its flat `key = value` file format.

Example file:

    # Setting I, the strong-signal column
    setting = I
    lambda = 4
    T = 1024
    h0 = 1
    methods = UP, TIPUP, 1TIPUP, iTIPUP, TOPUP, 1TOPUP, iTOPUP
    nrep = 100
    seed = 2024
    trajectory = true

List-valued keys take comma-separated values. Blank lines and `#` comments are ignored.
"""

import logging
from pathlib import Path

from beartype.typing import Dict, List, Optional, Union
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError, UnknownPresetError
from ..iterative.config import method_preset
from ..simulation.models import DEFAULT_RHO, ModelSpec, Setting, preset

logger = logging.getLogger(__name__)

LIST_KEYS = {"dims", "ranks", "phis", "lambda", "T", "h0", "methods", "rho"}
KEY_TO_FIELD = {
    "setting": "setting",
    "dims": "dims",
    "ranks": "ranks",
    "phis": "phis",
    "lambda": "lambda_list",
    "rho": "rho",
    "noise_scale": "noise_scale",
    "T": "T_list",
    "h0": "h0_list",
    "methods": "methods",
    "nrep": "nrep",
    "seed": "seed",
    "epsilon": "epsilon",
    "max_iter": "max_iter",
    "trajectory": "record_trajectory",
    "timing": "timing",
    "workers": "workers",
}


class ExperimentConfig(BaseModel):
    """A Monte Carlo experiment: a grid of (T, lambda) setting points, lag counts and methods, replicated nrep times.

    Either `setting` or all of `dims`, `ranks` and `phis` must be given; explicit values override the setting's.

    Attributes:
        setting: The reference setting the model is based on.
        dims: The observation dimensions.
        ranks: The core dimensions.
        phis: The AR(1) coefficients of the core entries.
        lambda_list: The signal scales to sweep.
        rho: The noise equicorrelation, one value or one per mode.
        noise_scale: The noise standard deviation.
        T_list: The series lengths to sweep.
        h0_list: The lag counts to sweep.
        methods: The method presets to run on every data set.
        nrep: The number of replications per setting point.
        seed: The master seed.
        epsilon: Tolerance override for iterative methods.
        max_iter: Sweep cap override for iterative methods.
        record_trajectory: Emit init and sweep1 stages for iterative methods.
        timing: Record wall times; when off, wall_time_ms is written as 0.
        workers: Number of worker threads; None lets the executor decide.
    """

    model_config = ConfigDict(frozen=True)

    setting: Optional[Setting] = Field(None, description="The reference setting")
    dims: Optional[List[int]] = Field(None, description="The observation dimensions")
    ranks: Optional[List[int]] = Field(None, description="The core dimensions")
    phis: Optional[List[float]] = Field(None, description="The AR(1) coefficients of the core entries")
    lambda_list: List[float] = Field([1.0], min_length=1, description="The signal scales to sweep")
    rho: List[float] = Field([DEFAULT_RHO], min_length=1, description="The noise equicorrelation")
    noise_scale: float = Field(1.0, ge=0, description="The noise standard deviation")
    T_list: List[int] = Field([256], min_length=1, description="The series lengths to sweep")
    h0_list: List[int] = Field([1], min_length=1, description="The lag counts to sweep")
    methods: List[str] = Field(..., min_length=1, description="The method presets to run")
    nrep: int = Field(1, ge=1, description="Replications per setting point")
    seed: int = Field(0, ge=0, description="The master seed")
    epsilon: Optional[float] = Field(None, ge=0, description="Tolerance override for iterative methods")
    max_iter: Optional[int] = Field(None, ge=0, description="Sweep cap override for iterative methods")
    record_trajectory: bool = Field(False, description="Emit init and sweep1 stages for iterative methods")
    timing: bool = Field(False, description="Record wall times")
    workers: Optional[int] = Field(None, ge=1, description="Number of worker threads")

    @field_validator("setting", mode="before")
    @classmethod
    def _parse_setting(cls, value: object) -> object:
        return None if value is None else Setting.parse(value)

    @field_validator("methods")
    @classmethod
    def _known_methods(cls, methods: List[str]) -> List[str]:
        return [method_preset(m).name for m in methods]

    @field_validator("T_list", "h0_list")
    @classmethod
    def _positive(cls, values: List[int]) -> List[int]:
        if any(v < 1 for v in values):
            raise ValueError(f"Values must be positive, got {values}")
        return values

    @model_validator(mode="after")
    def _check_model(self) -> "ExperimentConfig":
        if self.setting is None and (self.dims is None or self.ranks is None or self.phis is None):
            raise ValueError("Give either a setting or all of dims, ranks and phis")
        if max(self.h0_list) >= min(self.T_list):
            raise ValueError(f"Every h0 {self.h0_list} must be below every T {self.T_list}")
        # Validates the model once, so bad dims / ranks / phis surface at load time
        self.spec_for(self.T_list[0], self.lambda_list[0])
        return self

    @property
    def label(self) -> str:
        """The setting column of the records: the setting name, or "custom"."""
        return "custom" if self.setting is None else self.setting.value

    def spec_for(self, T: int, lambda_: float) -> ModelSpec:
        """The model of one setting point.

        Args:
            T (int): The series length.
            lambda_ (float): The signal scale.

        Returns:
            ModelSpec: The model, seeded with the master seed.
        """
        fields: Dict[str, object] = {}
        if self.setting is not None:
            base = preset(self.setting, lambda_=lambda_, T=T, seed=self.seed)
            fields = {"dims": base.dims, "ranks": base.ranks, "ar_coeffs": base.ar_coeffs, "setting": self.setting}
        if self.dims is not None:
            fields["dims"] = self.dims
        if self.ranks is not None:
            fields["ranks"] = self.ranks
        if self.phis is not None:
            fields["ar_coeffs"] = self.phis
        return ModelSpec(
            lambda_=lambda_,
            noise_rho=self.rho,
            noise_scale=self.noise_scale,
            seed=self.seed,
            T=T,
            **fields,
        )


def parse_experiment_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse the `key = value` experiment format.

    Args:
        text (str): The file content.
        source (str, optional): Name used in error messages. Defaults to "<string>".

    Raises:
        ConfigError: On unknown or repeated keys, malformed lines, or values failing validation.

    Returns:
        ExperimentConfig: The config.
    """
    values: Dict[str, Union[str, List[str]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in KEY_TO_FIELD:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}; known keys: {', '.join(KEY_TO_FIELD)}")
        field = KEY_TO_FIELD[key]
        if field in values:
            raise ConfigError(f"{source}:{lineno}: key {key!r} given twice")
        values[field] = [v.strip() for v in value.split(",") if v.strip()] if key in LIST_KEYS else value

    try:
        return ExperimentConfig(**values)
    except (ValidationError, UnknownPresetError) as err:
        raise ConfigError(f"{source}: invalid experiment config\n{err}") from err


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Load an experiment config file.

    Args:
        path (Union[str, Path]): The file.

    Raises:
        ConfigError: If the file cannot be read or is malformed.

    Returns:
        ExperimentConfig: The config.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"Cannot read experiment config {path}: {err}") from err

    cfg = parse_experiment_config(text, source=str(path))
    logger.info(f"Loaded experiment config {path}: {len(cfg.methods)} methods x {cfg.nrep} replications")
    return cfg
