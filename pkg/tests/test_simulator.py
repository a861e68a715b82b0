import numpy as np
import pytest
from pydantic import ValidationError

from tensorfactor.errors import UnknownPresetError
from tensorfactor.estimators import Flavor, Normalization
from tensorfactor.simulation import (
    ModelSpec,
    Setting,
    ar1_autocovariance,
    ar1_paths,
    equicorrelation_sqrt,
    generate,
    population_signal,
    preset,
    replication_rngs,
)


@pytest.mark.parametrize("d, rho", [(1, 0.0), (4, 0.2), (16, 0.2), (7, 0.9)])
def test_equicorrelation_sqrt_squares_to_psi(d, rho):
    s = equicorrelation_sqrt(d, rho)
    psi = (1 - rho) * np.eye(d) + rho * np.ones((d, d))
    assert np.allclose(s, s.T)
    assert np.allclose(s @ s, psi, atol=1e-12)


@pytest.mark.parametrize(
    "setting, ranks, phis",
    [("I", [1, 1], [0.8]), ("2", [1, 2], [0.8, 0.6]), ("iii", [1, 2], [0.8, -0.8])],
)
def test_presets(setting, ranks, phis):
    spec = preset(setting, lambda_=2.0, T=100, seed=3)
    assert spec.dims == [16, 16]
    assert spec.ranks == ranks
    assert spec.ar_coeffs == phis
    assert spec.rhos == (0.2, 0.2)
    assert (spec.lambda_, spec.T, spec.seed) == (2.0, 100, 3)


def test_setting_parse_rejects_unknown_names():
    assert Setting.parse(Setting.II) is Setting.II
    with pytest.raises(UnknownPresetError):
        Setting.parse("IV")


def test_model_spec_accepts_the_lambda_alias():
    spec = ModelSpec.model_validate({"dims": [3, 3], "ranks": [1, 1], "lambda": 4.0})
    assert spec.lambda_ == 4.0
    assert spec.phis.tolist() == [0.8]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"dims": [3, 3], "ranks": [1]},
        {"dims": [3, 3], "ranks": [4, 1]},
        {"dims": [3, 3], "ranks": [1, 2], "ar_coeffs": [0.1, 0.2, 0.3]},
        {"dims": [3, 3], "ranks": [1, 1], "ar_coeffs": [1.0]},
        {"dims": [3, 3], "ranks": [1, 1], "noise_rho": [1.0]},
        {"dims": [3, 3, 3, 3, 3], "ranks": [1, 1, 1, 1, 1]},
    ],
)
def test_model_spec_rejects_invalid_models(kwargs):
    with pytest.raises(ValidationError):
        ModelSpec(**kwargs)


def test_same_seed_gives_identical_draws():
    spec = preset("II", T=30, seed=5)
    first, second = generate(spec, replication=2), generate(spec, replication=2)
    assert np.array_equal(first.observed_series.values, second.observed_series.values)
    assert np.array_equal(first.loadings.mode(2).cols, second.loadings.mode(2).cols)


def test_replications_use_different_streams():
    spec = preset("I", T=30, seed=5)
    first, second = generate(spec, replication=0), generate(spec, replication=1)
    assert not np.array_equal(first.observed_series.values, second.observed_series.values)


def test_common_random_numbers_across_lambda_and_t():
    short = generate(preset("II", lambda_=1.0, T=50, seed=9), replication=4)
    strong = generate(preset("II", lambda_=3.0, T=50, seed=9), replication=4)
    assert np.array_equal(short.loadings.mode(1).cols, strong.loadings.mode(1).cols)
    assert np.array_equal(short.factor_series.values, strong.factor_series.values)
    assert np.array_equal(short.noise_series.values, strong.noise_series.values)

    longer = generate(preset("II", lambda_=1.0, T=80, seed=9), replication=4)
    assert np.array_equal(short.loadings.mode(2).cols, longer.loadings.mode(2).cols)


def test_replication_streams_are_independent_generators():
    streams = replication_rngs(0, 3)
    assert len(streams) == 3
    draws = [rng.standard_normal(4) for rng in streams]
    assert not np.array_equal(draws[0], draws[1])


def test_ground_truth_shapes_and_loadings():
    truth = generate(preset("II", T=40))
    assert truth.observed_series.shape == (16, 16)
    assert len(truth.observed_series) == 40
    assert truth.factor_series.shape == (1, 2)
    for basis in truth.loadings.bases:
        assert np.allclose(basis.cols.T @ basis.cols, np.eye(basis.rank), atol=1e-12)
    assert np.allclose(
        truth.signal_series.values + truth.noise_series.values, truth.observed_series.values, atol=0
    )


def test_zero_signal_leaves_only_noise():
    truth = generate(preset("I", lambda_=0.0, T=20))
    assert np.array_equal(truth.observed_series.values, truth.noise_series.values)
    assert not truth.signal_series.values.any()


def test_white_noise_has_unit_variance():
    spec = ModelSpec(dims=[6, 5], ranks=[1, 1], lambda_=0.0, noise_rho=[0.0], T=4000)
    values = generate(spec).observed_series.values
    assert values.var() == pytest.approx(1.0, rel=0.02)


def test_noise_scale_multiplies_the_noise():
    unit = generate(preset("I", T=20, noise_scale=1.0))
    half = generate(preset("I", T=20, noise_scale=0.5))
    assert np.allclose(half.noise_series.values, 0.5 * unit.noise_series.values)


def test_ar1_paths_are_stationary():
    rng = np.random.default_rng(1)
    paths = ar1_paths(rng, np.array([0.8, -0.5]), 50_000, burn_in=0)
    assert paths[:, 0].var() == pytest.approx(1 / 0.36, rel=0.08)
    assert paths[:, 1].var() == pytest.approx(1 / 0.75, rel=0.08)
    lag_one = np.mean(paths[1:, 0] * paths[:-1, 0])
    assert lag_one == pytest.approx(0.8 / 0.36, rel=0.1)


def test_ar1_paths_follow_the_recursion():
    rng = np.random.default_rng(2)
    phis = np.array([0.3])
    paths = ar1_paths(np.random.default_rng(2), phis, 10, burn_in=0)
    start = rng.standard_normal(1) / np.sqrt(1 - 0.09)
    innovations = rng.standard_normal((10, 1))
    assert paths[0, 0] == pytest.approx(0.3 * start[0] + innovations[0, 0])
    assert np.allclose(paths[1:, 0], 0.3 * paths[:-1, 0] + innovations[1:, 0])


def test_opposite_ar_coefficients_cancel_in_the_lag_one_cross_moment():
    truth = generate(preset("III", T=100_000, seed=4, noise_scale=0.0))
    f = truth.factor_series.values[:, 0, :]
    per_entry = np.mean(f[1:] * f[:-1], axis=0)
    assert per_entry[0] == pytest.approx(0.8 / 0.36, rel=0.1)
    assert per_entry[1] == pytest.approx(-0.8 / 0.36, rel=0.1)
    assert abs(per_entry.sum()) < 0.2


def test_ar1_autocovariance():
    assert ar1_autocovariance(np.array([0.8]), 0)[0] == pytest.approx(1 / 0.36)
    assert ar1_autocovariance(np.array([0.8]), 1)[0] == pytest.approx(0.8 / 0.36)
    with pytest.raises(ValueError):
        ar1_autocovariance(np.array([1.0]), 1)


def test_population_signal_setting_one_topup():
    strengths = population_signal(preset("I", lambda_=2.0), h0=1, flavor=Flavor.TOPUP)
    assert strengths == pytest.approx([4.0 * 0.8 / 0.36] * 2)


def test_population_signal_setting_three_cancels_at_lag_one():
    spec = preset("III")
    assert population_signal(spec, h0=1, flavor=Flavor.TIPUP)[0] == pytest.approx(0.0, abs=1e-12)
    assert population_signal(spec, h0=1, flavor=Flavor.TOPUP)[0] > 1.0
    assert population_signal(spec, h0=2, flavor=Flavor.TIPUP)[0] == pytest.approx(2 * 0.64 / 0.36 / 2)


def test_population_signal_normalizations():
    spec = preset("III")
    figure = population_signal(spec, h0=2, normalization=Normalization.FIGURE)[0]
    paper = population_signal(spec, h0=2, normalization=Normalization.PAPER_EQ)[0]
    assert paper == pytest.approx(figure * np.sqrt(2))


def test_population_signal_rejects_up():
    with pytest.raises(ValueError):
        population_signal(preset("I"), flavor=Flavor.UP)
