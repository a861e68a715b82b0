import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensorfactor.errors import DegenerateMomentError, LagError, RankError, TensorShapeError
from tensorfactor.estimators import (
    Flavor,
    MomentConfig,
    Normalization,
    TopupOperator,
    autocov_tipup_matrix,
    autocov_topup_unfolding,
    estimate_loading,
    lag0_tipup,
    lagged_autocovariance,
    signal_strength,
    tipup_matrix,
    topup_gram,
    topup_unfolding,
    up_unfolding,
)
from tensorfactor.spectral import projector, subspace_distance
from tensorfactor.tensor import TensorSeries, unfold


def naive_topup_matrix(series, k, h0):
    """Materialize every order-5 lag block with explicit loops over time."""
    T = len(series)
    blocks = []
    for h in range(1, h0 + 1):
        acc = 0.0
        for t in range(h, T):
            acc = acc + np.multiply.outer(unfold(series[t - h], k), unfold(series[t], k))
        blocks.append((acc / (T - h)).reshape(acc.shape[0], -1))
    return np.hstack(blocks)


def naive_tipup_matrix(series, k, h0):
    T = len(series)
    blocks = []
    for h in range(1, h0 + 1):
        acc = sum(unfold(series[t - h], k) @ unfold(series[t], k).T for t in range(h, T))
        blocks.append(acc / (T - h))
    return np.hstack(blocks)


series_cases = st.tuples(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=3),
    st.integers(min_value=3, max_value=8),
)


@given(case=series_cases, data=st.data())
def test_topup_gram_matches_naive_order_five_tensor(case, data):
    seed, dims, T = case
    series = TensorSeries(values=np.random.default_rng(seed).standard_normal((T, *dims)))
    k = data.draw(st.integers(1, len(dims)))
    h0 = data.draw(st.integers(1, T - 1))

    naive = naive_topup_matrix(series, k, h0)
    expected = naive @ naive.T
    assert np.allclose(topup_gram(series, k, h0), expected, rtol=1e-8, atol=1e-8 * max(1.0, np.abs(expected).max()))


@given(case=series_cases, data=st.data())
def test_tipup_matrix_matches_naive_loop(case, data):
    seed, dims, T = case
    series = TensorSeries(values=np.random.default_rng(seed).standard_normal((T, *dims)))
    k = data.draw(st.integers(1, len(dims)))
    h0 = data.draw(st.integers(1, T - 1))
    assert np.allclose(tipup_matrix(series, k, h0), naive_tipup_matrix(series, k, h0), rtol=1e-10, atol=1e-10)


def test_topup_gram_two_observations(random_series):
    series = random_series((3, 2), T=2)
    x1, x2 = series.values
    expected = np.sum(x2**2) * x1 @ x1.T
    assert np.allclose(topup_gram(series, 1, 1), expected, atol=1e-12)


def test_tipup_matrix_two_observations(random_series):
    series = random_series((3, 2), T=2)
    x1, x2 = series.values
    assert np.allclose(tipup_matrix(series, 1, 1), x1 @ x2.T, atol=1e-12)


def test_zero_series_gives_zero_moments():
    series = TensorSeries(values=np.zeros((5, 3, 2)))
    assert not topup_gram(series, 1, 2).any()
    assert not tipup_matrix(series, 2, 2).any()


def test_topup_gram_is_symmetric_psd(random_series):
    gram = topup_gram(random_series((3, 3, 2), T=9), 2, 3)
    assert np.allclose(gram, gram.T, atol=1e-12)
    assert np.linalg.eigvalsh(gram).min() > -1e-8 * np.abs(gram).max()


def test_topup_unfolding_gram_and_guard(random_series):
    series = random_series((3, 4), T=7)
    unfolding = topup_unfolding(series, 2, 2)
    assert unfolding.shape == (4, 3 * 4 * 3 * 2)
    assert np.allclose(unfolding @ unfolding.T, topup_gram(series, 2, 2), atol=1e-10)
    with pytest.raises(TensorShapeError):
        topup_unfolding(series, 2, 2, max_entries=10)


@pytest.mark.parametrize("dims", [(6, 2), (2, 6)])
def test_topup_operator_routes_agree_with_the_gram(random_series, dims):
    # (6, 2) is a narrow unfolding and takes the direct svd, (2, 6) a wide one and takes the gram
    series = random_series(dims, T=9)
    basis, singular_values = TopupOperator(h0=2).leading(series, 1, 1)
    gram = topup_gram(series, 1, 2)
    w = np.sqrt(np.clip(np.linalg.eigvalsh(gram)[::-1], 0.0, None))
    n = min(singular_values.size, w.size)
    assert np.allclose(singular_values[:n], w[:n], rtol=1e-8, atol=1e-10)
    leading = np.linalg.eigh(gram)[1][:, [-1]]
    assert np.allclose(projector(basis), leading @ leading.T, atol=1e-8)


def test_tipup_is_a_contraction_of_the_lagged_moment_tensors(random_series):
    series = random_series((2, 3), T=8)
    for h0 in (1, 2, 3):
        sigmas = [lagged_autocovariance(series, h) for h in range(1, h0 + 1)]
        for k in (1, 2):
            assert np.allclose(autocov_tipup_matrix(sigmas, k), tipup_matrix(series, k, h0), atol=1e-10)
            rebuilt = autocov_topup_unfolding(sigmas, k)
            assert np.allclose(rebuilt @ rebuilt.T, topup_gram(series, k, h0), atol=1e-10)


def test_lagged_autocovariance_order_and_values(random_series):
    series = random_series((2, 3), T=6)
    sigma = lagged_autocovariance(series, 2)
    assert sigma.dims == (2, 3, 2, 3)
    expected = sum(np.multiply.outer(series.values[t - 2], series.values[t]) for t in range(2, 6)) / 4
    assert np.allclose(sigma.data, expected, atol=1e-12)


def test_lag_bounds(random_series):
    series = random_series((2, 2), T=4)
    with pytest.raises(LagError):
        tipup_matrix(series, 1, 4)
    with pytest.raises(LagError):
        topup_gram(series, 1, 0)


def test_up_unfolding_stacks_time_as_last_mode(random_series):
    series = random_series((2, 3), T=5)
    m = up_unfolding(series, 2)
    assert m.shape == (3, 2 * 5)
    # column t + T*i holds row i of X_t: time runs fastest, then mode 1
    assert np.array_equal(m[:, :5], series.values[:, 0, :].T)
    assert np.array_equal(m[:, 5 + 3], series.values[3, 1, :])


def test_noiseless_rank_one_tipup_spans_the_left_factor(rng):
    a, b = np.array([1.0, 2.0, -1.0]), np.array([0.6, 0.8])
    f = np.cumsum(rng.standard_normal(30)) * 0.1 + 1.0
    series = TensorSeries(values=f[:, None, None] * np.outer(a, b)[None])
    block = tipup_matrix(series, 1, 1)
    expected = np.outer(a, a) * np.sum(f[:-1] * f[1:]) / 29
    assert np.allclose(block, expected, rtol=1e-10)


@pytest.mark.parametrize("flavor", list(Flavor))
def test_noiseless_exact_recovery(noiseless_setting_two, flavor):
    series = noiseless_setting_two.observed_series
    for k, rank in enumerate(noiseless_setting_two.spec.ranks, start=1):
        basis = estimate_loading(series, k, rank, MomentConfig(flavor=flavor, h0=1))
        assert subspace_distance(basis, noiseless_setting_two.loadings.mode(k)) < 1e-8


@pytest.mark.parametrize("flavor", list(Flavor))
def test_noiseless_moments_stay_inside_the_loading_space(noiseless_setting_two, flavor):
    series = noiseless_setting_two.observed_series
    outside = np.eye(16) - projector(noiseless_setting_two.loadings.mode(2))
    if flavor == Flavor.TOPUP:
        moment = topup_gram(series, 2, 2)
    elif flavor == Flavor.TIPUP:
        moment = tipup_matrix(series, 2, 2)
    else:
        moment = up_unfolding(series, 2)
    assert np.abs(outside @ moment).max() < 1e-10 * max(1.0, np.abs(moment).max())


def test_estimate_loading_errors(random_series):
    with pytest.raises(RankError):
        estimate_loading(random_series((3, 2), T=6), 2, 3)
    with pytest.raises(DegenerateMomentError):
        estimate_loading(TensorSeries(values=np.zeros((6, 3, 2))), 1, 1, MomentConfig(flavor=Flavor.TIPUP))
    with pytest.raises(DegenerateMomentError):
        TopupOperator(h0=2).estimate(TensorSeries(values=np.zeros((6, 3, 2))), 1, 1)


def test_scale_equivariance(random_series):
    series = random_series((4, 3), T=12)
    scaled = TensorSeries(values=3.0 * series.values)

    for flavor in Flavor:
        cfg = MomentConfig(flavor=flavor, h0=2)
        assert np.allclose(
            projector(estimate_loading(series, 1, 2, cfg)), projector(estimate_loading(scaled, 1, 2, cfg)), atol=1e-9
        )

    base, big = signal_strength(series, [2, 1], h0=2), signal_strength(scaled, [2, 1], h0=2)
    assert np.allclose(big.lambda_sq, 9.0 * np.asarray(base.lambda_sq), rtol=1e-9)
    assert np.allclose(big.lambda_star_sq, 9.0 * np.asarray(base.lambda_star_sq), rtol=1e-9)


@pytest.mark.parametrize("flavor", list(Flavor))
@pytest.mark.parametrize("c", [1e-8, 1e-6, 1e8])
def test_tiny_and_huge_data_are_not_degenerate(random_series, flavor, c):
    series = random_series((4, 3), T=12)
    scaled = TensorSeries(values=c * series.values)
    cfg = MomentConfig(flavor=flavor, h0=1)
    assert np.allclose(
        projector(estimate_loading(series, 1, 2, cfg)), projector(estimate_loading(scaled, 1, 2, cfg)), atol=1e-8
    )


def test_signal_strength_of_zero_series_is_zero():
    diagnostics = signal_strength(TensorSeries(values=np.zeros((6, 3, 2))), [1, 1])
    assert diagnostics.lambda_sq == [0.0, 0.0]
    assert diagnostics.lambda_star_sq == [0.0, 0.0]


def test_signal_strength_normalizations(random_series):
    series = random_series((3, 3), T=10)
    figure = signal_strength(series, [1, 1], h0=2, normalization=Normalization.FIGURE)
    paper = signal_strength(series, [1, 1], h0=2, normalization=Normalization.PAPER_EQ)
    tau = np.linalg.svd(tipup_matrix(series, 1, 2), compute_uv=False)[0]
    assert figure.lambda_star_sq[0] == pytest.approx(tau / 2, rel=1e-9)
    assert paper.lambda_star_sq[0] == pytest.approx(tau / np.sqrt(2), rel=1e-9)


def test_signal_strength_rejects_wrong_rank_count(random_series):
    with pytest.raises(RankError):
        signal_strength(random_series((3, 3), T=10), [1])


def test_weak_modes_flags_white_noise(rng):
    series = TensorSeries(values=rng.standard_normal((2000, 4, 4)))
    diagnostics = signal_strength(series, [1, 1])
    assert diagnostics.weak_modes() == [1, 2]
    assert diagnostics.lag0_scale[0] == pytest.approx(np.linalg.eigvalsh(lag0_tipup(series, 1))[-1])
