import itertools

import numpy as np
import pytest

from maxaffine.exceptions import (
    DegenerateInputError,
    DegenerateParametersError,
    InvalidInputError,
    UnsupportedSizeError,
)
from maxaffine.experiments.common import perturbed_init
from maxaffine.metrics import (
    dist,
    init_condition,
    is_recovered,
    prediction_error,
    scaled_dist,
    subspace_error,
)
from maxaffine.model import ParamSet, append_ones


def test_dist_identical_sets():
    ps = ParamSet.from_matrix([[1.0, 2.0, 0.0], [0.0, -1.0, 3.0]])
    match = dist(ps, ps)
    assert match.value == 0.0
    assert match.permutation == (0, 1)


def test_dist_swapped_labels():
    ps = ParamSet.from_matrix([[1.0, 2.0, 0.0], [0.0, -1.0, 3.0]])
    match = dist(ps.relabel([1, 0]), ps)
    assert match.value == 0.0
    assert match.permutation == (1, 0)


def test_dist_matches_brute_force(random_generator):
    a = ParamSet.from_matrix(random_generator.standard_normal((4, 3)))
    b = ParamSet.from_matrix(random_generator.standard_normal((4, 3)))
    brute = min(
        np.sum((a.matrix[list(perm)] - b.matrix) ** 2)
        for perm in itertools.permutations(range(4))
    )
    assert dist(a, b).value == pytest.approx(brute, abs=1e-12)


def test_dist_is_symmetric(random_generator):
    a = ParamSet.from_matrix(random_generator.standard_normal((5, 3)))
    b = ParamSet.from_matrix(random_generator.standard_normal((5, 3)))
    forward, backward = dist(a, b), dist(b, a)
    assert forward.value == pytest.approx(backward.value, abs=1e-12)
    # the reverse matching is the inverse relabeling
    assert np.argsort(forward.permutation).tolist() == list(backward.permutation)


def test_dist_rejects_mismatched_shapes():
    with pytest.raises(InvalidInputError):
        dist(ParamSet.standard_basis(2, 3), ParamSet.standard_basis(3, 3))


def test_scaled_dist_recovers_scale():
    b = ParamSet.from_matrix([[1.0, 2.0, 0.5], [-1.0, 0.0, 1.0]])
    match = scaled_dist(b.scaled(2.0), b)
    assert match.value == pytest.approx(0.0, abs=1e-20)
    assert match.scale == pytest.approx(0.5)


@pytest.mark.parametrize('lam', [0.1, 1.0, 10.0])
def test_scaled_dist_ignores_overall_scale(random_generator, lam):
    b = ParamSet.from_matrix(random_generator.standard_normal((3, 4)))
    a = ParamSet.from_matrix(b.matrix[[2, 0, 1]] + 0.2 * random_generator.standard_normal((3, 4)))
    base = scaled_dist(a, b)
    rescaled = scaled_dist(a.scaled(lam), b)
    assert rescaled.value == pytest.approx(base.value, rel=1e-9, abs=1e-12)
    assert rescaled.permutation == base.permutation
    assert rescaled.scale == pytest.approx(base.scale / lam)


def test_scaled_dist_matches_grid_search(random_generator):
    a = ParamSet.from_matrix(random_generator.standard_normal((3, 3)))
    b = ParamSet.from_matrix(random_generator.standard_normal((3, 3)))
    grid = np.linspace(1e-6, 10.0, 2000)
    step = grid[1] - grid[0]
    best_grid = min(
        np.sum((c * a.matrix[list(perm)] - b.matrix) ** 2)
        for perm in itertools.permutations(range(3))
        for c in grid
    )
    value = scaled_dist(a, b).value
    assert value <= best_grid + 1e-12
    # second-order loss from rounding c to the grid
    assert best_grid - value <= np.sum(a.matrix ** 2) * step ** 2


def test_scaled_dist_clips_at_zero():
    b = ParamSet.from_matrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    a = b.scaled(-1.0)
    match = scaled_dist(a, b)
    assert match.value == 2.0
    assert match.scale == 0.0


def test_scaled_dist_errors():
    with pytest.raises(UnsupportedSizeError):
        scaled_dist(ParamSet.standard_basis(10, 10), ParamSet.standard_basis(10, 10))
    with pytest.raises(DegenerateInputError):
        scaled_dist(ParamSet.from_matrix(np.zeros((2, 3))), ParamSet.standard_basis(2, 2))


def test_subspace_error_examples(random_generator):
    U, _ = np.linalg.qr(random_generator.standard_normal((5, 2)))
    assert subspace_error(U, U) == pytest.approx(0.0, abs=1e-24)
    assert subspace_error(np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]])) == 2.0

    O, _ = np.linalg.qr(random_generator.standard_normal((2, 2)))
    V, _ = np.linalg.qr(random_generator.standard_normal((5, 2)))
    assert subspace_error(U @ O, V) == pytest.approx(subspace_error(U, V), abs=1e-10)


def test_subspace_error_rejects_non_orthonormal():
    with pytest.raises(InvalidInputError):
        subspace_error(np.array([[2.0], [0.0]]), np.array([[1.0], [0.0]]))


def test_prediction_error_examples(random_generator):
    b = ParamSet.from_matrix(random_generator.standard_normal((3, 3)))
    Xi = append_ones(random_generator.standard_normal((25, 2)))
    assert prediction_error(b, b, Xi) == 0.0

    shifted = ParamSet.from_matrix(b.matrix + np.array([0.0, 0.0, 0.3]))
    assert prediction_error(shifted, b, Xi) == pytest.approx(0.09)

    a = ParamSet.from_matrix(random_generator.standard_normal((3, 3)))
    naive = np.mean([(max(xi @ a.matrix.T) - max(xi @ b.matrix.T)) ** 2 for xi in Xi])
    assert prediction_error(a, b, Xi) == pytest.approx(naive, abs=1e-12)


def test_is_recovered_examples():
    truth = ParamSet.standard_basis(2, 2)
    assert is_recovered(truth, truth, 1e-6)

    moved = ParamSet.from_matrix(truth.matrix + np.array([[0.0, 0.0, 0.02], [0.0, 0.0, 0.0]]))
    assert not is_recovered(moved, truth, 0.01)

    boundary = ParamSet.from_matrix(truth.matrix + np.array([[0.0, 0.0, 0.5], [0.0, 0.0, 0.0]]))
    assert is_recovered(boundary, truth, 0.5)


def test_is_recovered_ignores_labels():
    truth = ParamSet.standard_basis(3, 3)
    assert is_recovered(truth.relabel([2, 0, 1]), truth)


def test_init_condition_examples():
    truth = ParamSet.from_matrix([[1.0, 0.0, 0.2], [0.0, 1.0, -0.1], [-1.0, -1.0, 0.0]])
    assert init_condition(truth, truth) == pytest.approx(0.0, abs=1e-6)
    assert init_condition(truth.scaled(3.0), truth) == pytest.approx(0.0, abs=1e-6)


def test_init_condition_matches_grid_search(random_generator):
    truth = ParamSet.from_matrix([[1.0, 0.0, 0.2], [0.0, 1.0, -0.1], [-1.0, -1.0, 0.0]])
    a = ParamSet.from_matrix(truth.matrix + 0.3 * random_generator.standard_normal((3, 3)))
    aligned = a.matrix[list(dist(a, truth).permutation)]
    grid = np.linspace(0.0, 3.0, 200001)

    worst = np.zeros_like(grid)
    for j in range(3):
        for l in range(3):
            if j == l:
                continue
            gap = np.linalg.norm(truth.thetas[j] - truth.thetas[l])
            diff = grid[:, None] * (aligned[j] - aligned[l]) - (truth.matrix[j] - truth.matrix[l])
            worst = np.maximum(worst, np.linalg.norm(diff, axis=1) / gap)

    assert init_condition(a, truth) == pytest.approx(worst.min(), abs=1e-4)


def test_init_condition_perturbation_bound(stream):
    truth = ParamSet.standard_basis(4, 6)
    start = perturbed_init(truth, 0.1, stream)
    # every slope gap of the standard basis is sqrt(2)
    assert init_condition(start, truth) <= 2 * 0.1 / np.sqrt(2.0) + 1e-9


def test_init_condition_degenerate_truth():
    with pytest.raises(DegenerateParametersError):
        init_condition(ParamSet.standard_basis(1, 2), ParamSet.standard_basis(1, 2))
    duplicate = ParamSet.from_matrix([[1.0, 0.0, 0.0], [1.0, 0.0, 1.0]])
    with pytest.raises(DegenerateParametersError):
        init_condition(duplicate, duplicate)
