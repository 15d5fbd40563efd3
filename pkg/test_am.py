import numpy as np
import pytest

from maxaffine.am import (
    am_run,
    am_run_until,
    am_step,
    least_squares_objective,
    pr_run,
    pr_step,
    rand_am_baseline,
)
from maxaffine.covariates import CovariateDist, synthesize, synthesize_pr
from maxaffine.exceptions import InvalidInputError
from maxaffine.experiments.common import perturbed_init
from maxaffine.model import ParamSet, append_ones
from maxaffine.numerics import RngStream, as_generator, sample_unit_ball, sample_unit_sphere, solve_min_norm_ls


def test_truth_is_a_fixed_point(stream):
    truth = ParamSet.standard_basis(3, 3)
    data = synthesize(truth, CovariateDist.GAUSSIAN, 300, 0.0, stream)
    updated, part = am_step(truth, data.Xi, data.y)
    np.testing.assert_allclose(updated.matrix, truth.matrix, atol=1e-10)
    assert part.n == 300


def test_single_piece_is_global_least_squares(stream, random_generator):
    X = random_generator.standard_normal((40, 3))
    y = random_generator.standard_normal(40)
    Xi = append_ones(X)
    start = ParamSet.from_matrix([[0.1, 0.2, 0.3, 0.4]])
    updated, _ = am_step(start, Xi, y)
    np.testing.assert_allclose(updated.matrix[0], solve_min_norm_ls(Xi, y), atol=1e-12)


def _line_fit(x, y):
    slope = np.sum((x - x.mean()) * (y - y.mean())) / np.sum((x - x.mean()) ** 2)
    return np.array([slope, y.mean() - slope * x.mean()])


def test_step_matches_brute_force():
    ps = ParamSet.from_matrix([[1.0, 0.0], [-1.0, 0.0]])
    x = np.array([-2.0, -1.0, -0.5, 0.5, 1.5, 3.0])
    y = np.array([2.1, 0.9, 0.7, 0.4, 1.6, 2.8])
    updated, part = am_step(ps, append_ones(x[:, None]), y)

    np.testing.assert_array_equal(part.subsets[0], [3, 4, 5])
    np.testing.assert_array_equal(part.subsets[1], [0, 1, 2])
    np.testing.assert_allclose(updated.matrix[0], _line_fit(x[3:], y[3:]), atol=1e-10)
    np.testing.assert_allclose(updated.matrix[1], _line_fit(x[:3], y[:3]), atol=1e-10)


def test_refit_is_optimal_on_every_subset(random_generator):
    X = random_generator.standard_normal((200, 4))
    Xi = append_ones(X)
    y = random_generator.standard_normal(200)
    ps = ParamSet.from_matrix(ParamSet.standard_basis(3, 4).matrix + 0.1 * random_generator.standard_normal((3, 5)))
    updated, part = am_step(ps, Xi, y)

    for j, rows in enumerate(part.subsets):
        assert rows.size > 5
        residual = y[rows] - Xi[rows] @ updated.matrix[j]
        np.testing.assert_allclose(Xi[rows].T @ residual, 0.0, atol=1e-9)
        old = y[rows] - Xi[rows] @ ps.matrix[j]
        assert residual @ residual <= old @ old


def test_empty_piece_keeps_its_parameters(random_generator):
    ps = ParamSet.from_matrix([[1.0, 10.0], [1.0, 0.0]])
    Xi = append_ones(random_generator.standard_normal((10, 1)))
    updated, part = am_step(ps, Xi, random_generator.standard_normal(10))
    assert part.sizes()[1] == 0
    np.testing.assert_array_equal(updated.matrix[1], [1.0, 0.0])


def test_run_with_zero_iterations(stream):
    truth = ParamSet.standard_basis(2, 2)
    data = synthesize(truth, CovariateDist.GAUSSIAN, 20, 0.1, stream)
    trace = am_run(truth, data.Xi, data.y, 0)
    assert trace.iterates == [truth]
    assert trace.T == 0
    assert trace.objective == [least_squares_objective(truth, data.Xi, data.y)]


def test_run_rejects_negative_iterations(stream):
    truth = ParamSet.standard_basis(2, 2)
    data = synthesize(truth, CovariateDist.GAUSSIAN, 20, 0.1, stream)
    with pytest.raises(InvalidInputError):
        am_run(truth, data.Xi, data.y, -1)


def test_noiseless_recovery_from_perturbed_start():
    truth = ParamSet.standard_basis(3, 10)
    exact = 0
    for seed in range(5):
        stream = RngStream(seed)
        data = synthesize(truth, CovariateDist.GAUSSIAN, 300, 0.0, stream.child('data'))
        start = perturbed_init(truth, 0.3, stream.child('init'))
        trace = am_run(start, data.Xi, data.y, 10)
        errors = [np.sum((ps.matrix - truth.matrix) ** 2) for ps in trace.iterates]
        exact += min(errors) < 1e-10
    assert exact >= 4


def test_run_until_stops_once_converged(stream):
    truth = ParamSet.standard_basis(2, 3)
    data = synthesize(truth, CovariateDist.GAUSSIAN, 100, 0.0, stream)
    trace = am_run_until(truth, data.Xi, data.y, 20, 1e-9)
    assert trace.T == 1
    np.testing.assert_allclose(trace.final.matrix, truth.matrix, atol=1e-10)


def test_pr_step_fixed_points(stream):
    theta = np.array([0.6, -0.8, 0.3])
    data = synthesize_pr(theta, CovariateDist.GAUSSIAN, 50, 0.0, stream)
    np.testing.assert_allclose(pr_step(theta, data.X, data.y), theta, atol=1e-12)
    np.testing.assert_allclose(pr_step(-theta, data.X, data.y), -theta, atol=1e-12)


def test_pr_step_commutes_with_sign(random_generator):
    X = random_generator.standard_normal((60, 4))
    y = np.abs(X @ np.array([0.5, -1.0, 0.2, 0.8])) + 0.1 * random_generator.standard_normal(60)
    theta = random_generator.standard_normal(4)
    np.testing.assert_allclose(pr_step(-theta, X, y), -pr_step(theta, X, y), atol=1e-10)


def test_pr_step_by_hand():
    X = np.array([[1.0], [-2.0], [0.0], [3.0], [-1.0]])
    y = np.array([1.2, 1.9, 0.1, 2.7, 1.1])
    # signs at theta=0.5 are (+, -, +, +, -): sgn(0) = +1
    s = np.array([1.0, -1.0, 1.0, 1.0, -1.0])
    expected = np.sum(s * X[:, 0] * y) / np.sum(X[:, 0] ** 2)
    np.testing.assert_allclose(pr_step(np.array([0.5]), X, y), [expected])


def test_pr_run_zero_iterations():
    theta0 = np.array([1.0, 2.0])
    trace = pr_run(theta0, np.eye(2), np.ones(2), 0)
    assert len(trace.iterates) == 1
    np.testing.assert_array_equal(trace.final, theta0)


@pytest.mark.parametrize('dist', [CovariateDist.GAUSSIAN, CovariateDist.UNIFORM_CUBE])
def test_pr_exact_recovery_near_truth(dist):
    recovered = 0
    for seed in range(20):
        stream = RngStream(seed)
        theta_star = sample_unit_sphere(50, stream.child('truth'))
        data = synthesize_pr(theta_star, dist, 500, 0.0, stream.child('data'))
        theta0 = theta_star + 0.2 * sample_unit_sphere(50, stream.child('init'))
        final = pr_run(theta0, data.X, data.y, 15).final
        error = min(np.linalg.norm(final - theta_star), np.linalg.norm(final + theta_star))
        recovered += error < 1e-8
    assert recovered >= 18


def test_baseline_with_one_restart_is_a_single_run(stream):
    truth = ParamSet.standard_basis(2, 3)
    data = synthesize(truth, CovariateDist.GAUSSIAN, 80, 0.1, stream.child('data'))
    result = rand_am_baseline(data, 2, 1, 5, stream.child('baseline'))
    start = sample_unit_ball(4, as_generator(stream.child('baseline')), size=2)
    expected = am_run(ParamSet.from_matrix(start), data.Xi, data.y, 5).final
    np.testing.assert_allclose(result.params.matrix, expected.matrix, atol=1e-12)
    assert result.selected_index == 0


def test_baseline_keeps_smallest_objective(stream):
    truth = ParamSet.standard_basis(2, 3)
    data = synthesize(truth, CovariateDist.GAUSSIAN, 80, 0.1, stream.child('data'))
    result = rand_am_baseline(data, 2, 6, 5, stream.child('baseline'))
    assert result.objectives.shape == (6,)
    assert result.objectives[result.selected_index] == result.objectives.min()


def test_baseline_needs_a_restart(stream):
    data = synthesize(ParamSet.standard_basis(2, 3), CovariateDist.GAUSSIAN, 20, 0.1, stream)
    with pytest.raises(InvalidInputError):
        rand_am_baseline(data, 2, 0, 5, stream)
