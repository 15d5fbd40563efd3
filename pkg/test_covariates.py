import math

import numpy as np
import pytest

from maxaffine.covariates import (
    CovariateDist,
    Dataset,
    generic_low_rank_truth,
    sample_covariates,
    synthesize,
    synthesize_pr,
)
from maxaffine.exceptions import InvalidInputError
from maxaffine.model import AffineParam, ParamSet, eval_max_affine, predict


def test_uniform_cube_support_and_variance(stream):
    X = sample_covariates(CovariateDist.UNIFORM_CUBE, 100000, 1, stream)
    assert np.all(np.abs(X) <= math.sqrt(3.0))
    assert abs(X.var() - 1.0) < 0.02


def test_rademacher_support(stream):
    X = sample_covariates('rademacher', 500, 4, stream)
    assert set(np.unique(X)) <= {-1.0, 1.0}


def test_centered_binomial_support_and_mean(stream):
    X = sample_covariates(CovariateDist.CENTERED_BINOMIAL, 100000, 1, stream)
    support = {(m - 4) / math.sqrt(2.4) for m in range(11)}
    assert all(any(abs(v - s) < 1e-12 for s in support) for v in np.unique(X))
    assert abs(X.mean()) < 0.01


@pytest.mark.parametrize('dist', list(CovariateDist))
def test_covariates_are_isotropic(stream, dist):
    X = sample_covariates(dist, 100000, 3, stream)
    np.testing.assert_allclose(X.mean(axis=0), 0.0, atol=0.02)
    np.testing.assert_allclose(X.T @ X / X.shape[0], np.eye(3), atol=0.03)


def test_unknown_distribution():
    with pytest.raises(InvalidInputError):
        CovariateDist.from_name('cauchy')
    assert CovariateDist.from_name('Uniform-Cube') is CovariateDist.UNIFORM_CUBE


def test_noiseless_synthesis_is_exact(stream):
    ps = ParamSet.from_matrix([[1.0, -1.0, 0.5], [-0.5, 2.0, 0.0], [0.0, 0.0, 1.0]])
    data = synthesize(ps, CovariateDist.GAUSSIAN, 50, 0.0, stream)
    expected = [eval_max_affine(ps, xi) for xi in data.Xi]
    np.testing.assert_allclose(data.y, expected, rtol=1e-12, atol=1e-12)
    assert data.truth is ps


def test_noise_variance(stream):
    ps = ParamSet.standard_basis(2, 3)
    data = synthesize(ps, CovariateDist.GAUSSIAN, 100000, 0.5, stream)
    residual = data.y - predict(ps, data.Xi)
    assert abs(residual.var() - 0.25) < 0.01


def test_constant_model(stream):
    ps = ParamSet((AffineParam(np.zeros(3), 2.5),))
    data = synthesize(ps, CovariateDist.GAUSSIAN, 10, 0.0, stream)
    np.testing.assert_array_equal(data.y, np.full(10, 2.5))


def test_same_stream_gives_same_covariates_for_any_sigma(stream):
    ps = ParamSet.standard_basis(2, 2)
    quiet = synthesize(ps, CovariateDist.GAUSSIAN, 20, 0.0, stream)
    noisy = synthesize(ps, CovariateDist.GAUSSIAN, 20, 0.3, stream)
    np.testing.assert_array_equal(quiet.X, noisy.X)


def test_phase_retrieval_synthesis(stream):
    theta = np.array([1.0, -2.0, 0.5])
    data = synthesize_pr(theta, CovariateDist.GAUSSIAN, 30, 0.0, stream)
    assert np.all(data.y >= 0)
    np.testing.assert_allclose(data.y, np.abs(data.X @ theta))

    zero = synthesize_pr(np.zeros(3), CovariateDist.GAUSSIAN, 30, 0.0, stream)
    np.testing.assert_array_equal(zero.y, np.zeros(30))


def test_split_halves(stream):
    data = synthesize(ParamSet.standard_basis(2, 2), CovariateDist.GAUSSIAN, 5, 0.0, stream)
    first, second = data.split()
    assert (first.n, second.n) == (3, 2)
    np.testing.assert_array_equal(np.vstack([first.X, second.X]), data.X)


def test_csv_round_trip(tmp_path, stream):
    data = synthesize(ParamSet.standard_basis(2, 3), CovariateDist.GAUSSIAN, 12, 0.1, stream)
    path = tmp_path / 'data.csv'
    data.to_csv(path)
    assert path.read_text().splitlines()[0] == 'x1,x2,x3,y'
    loaded = Dataset.from_csv(path)
    np.testing.assert_array_equal(loaded.X, data.X)
    np.testing.assert_array_equal(loaded.y, data.y)


def test_csv_rejects_bad_columns(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('a,b,y\n1,2,3\n')
    with pytest.raises(InvalidInputError):
        Dataset.from_csv(path)


def test_dataset_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        Dataset.from_arrays([[1.0], [np.nan]], [1.0, 2.0])


def test_low_rank_truth(stream):
    truth, U_star = generic_low_rank_truth(3, 8, stream)
    assert (truth.k, truth.d) == (3, 8)
    np.testing.assert_allclose(U_star.T @ U_star, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(truth.thetas @ truth.thetas.T, np.eye(3), atol=1e-12)
    projected = truth.thetas @ U_star @ U_star.T
    np.testing.assert_allclose(projected, truth.thetas, atol=1e-12)
    np.testing.assert_array_equal(truth.intercepts, np.zeros(3))
