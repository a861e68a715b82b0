import numpy as np
import pytest
from hypothesis import settings

from tensorfactor.simulation import GroundTruth, generate, preset
from tensorfactor.tensor import TensorSeries

settings.register_profile("tensorfactor", max_examples=200, deadline=None)
settings.load_profile("tensorfactor")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20231017)


@pytest.fixture
def random_series(rng: np.random.Generator):
    def make(shape, T=8) -> TensorSeries:
        return TensorSeries(values=rng.standard_normal((T, *shape)))

    return make


@pytest.fixture(scope="module")
def noiseless_setting_one() -> GroundTruth:
    return generate(preset("I", lambda_=1.0, T=200, seed=7, noise_scale=0.0))


@pytest.fixture(scope="module")
def noiseless_setting_two() -> GroundTruth:
    return generate(preset("II", lambda_=1.0, T=200, seed=11, noise_scale=0.0))
