"""
Error and diagnostic measures: label-matched distance, scale-invariant distance,
subspace error, prediction error, exact-recovery predicate and the
initialization-condition diagnostic.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import (
    DegenerateInputError,
    DegenerateParametersError,
    InvalidInputError,
    UnsupportedSizeError,
)
from .model import predict

logger = logging.getLogger(__name__)

MAX_SCALED_K = 9
ORTHONORMAL_TOL = 1e-8
TERNARY_ITERATIONS = 200


@dataclass(frozen=True, eq=False)
class MatchedDistance:
    """
    Distance after relabeling: value = sum_j ||scale * a[permutation[j]] - b[j]||^2.
    scale is 1 for the unscaled distance and 0 when the clipped optimum sits at the limit c -> 0.
    """
    value: float
    permutation: tuple
    scale: float = 1.0


def _check_pair(a, b):
    if a.k != b.k or a.d != b.d:
        raise InvalidInputError(f"Parameter sets differ in shape: (k={a.k}, d={a.d}) vs (k={b.k}, d={b.d})")


def dist(a, b):
    """
    Minimum over relabelings of sum_j ||a_P(j) - b_j||^2, solved exactly as a
    minimum-cost assignment.
    """
    _check_pair(a, b)
    A, B = a.matrix, b.matrix
    cost = np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=-1)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(a.k, dtype=int)
    perm[cols] = rows
    value = float(np.sum((A[perm] - B) ** 2))
    return MatchedDistance(value=value, permutation=tuple(int(p) for p in perm), scale=1.0)


def scaled_dist(a, b):
    """
    min over c > 0 and relabelings P of sum_j ||c a_P(j) - b_j||^2.

    Permutations are enumerated exhaustively because the optimal c couples
    all matched pairs; k is capped at 9.
    """
    _check_pair(a, b)
    if a.k > MAX_SCALED_K:
        raise UnsupportedSizeError(f"scaled_dist enumerates k! permutations; k={a.k} exceeds {MAX_SCALED_K}")
    A, B = a.matrix, b.matrix
    norm_a = float(np.sum(A ** 2))
    if norm_a == 0.0:
        raise DegenerateInputError("Cannot rescale an all-zero parameter set")
    norm_b = float(np.sum(B ** 2))
    gram = A @ B.T

    best = None
    cols = np.arange(a.k)
    for perm in itertools.permutations(range(a.k)):
        cross = float(gram[list(perm), cols].sum())
        c = cross / norm_a
        if c <= 0.0:
            c, value = 0.0, norm_b
        else:
            value = float(np.sum((c * A[list(perm)] - B) ** 2))
        if best is None or value < best.value:
            best = MatchedDistance(value=value, permutation=tuple(perm), scale=c)
    return best


def _check_orthonormal(name, U):
    gram = U.T @ U
    if np.linalg.norm(gram - np.eye(U.shape[1])) > ORTHONORMAL_TOL:
        raise InvalidInputError(f"{name} does not have orthonormal columns")


def subspace_error(U_hat, U_star):
    """||U_hat U_hat^T - U* U*^T||_F^2"""
    U_hat = np.asarray(U_hat, dtype=float)
    U_star = np.asarray(U_star, dtype=float)
    if U_hat.ndim != 2 or U_star.ndim != 2 or U_hat.shape[0] != U_star.shape[0]:
        raise InvalidInputError(f"Subspace bases of shapes {U_hat.shape} and {U_star.shape} are incompatible")
    _check_orthonormal('U_hat', U_hat)
    _check_orthonormal('U_star', U_star)
    diff = U_hat @ U_hat.T - U_star @ U_star.T
    return float(np.sum(diff ** 2))


def prediction_error(a, b, Xi):
    """(1/n) sum_i (max_j <xi_i, a_j> - max_j <xi_i, b_j>)^2"""
    _check_pair(a, b)
    diff = predict(a, Xi) - predict(b, Xi)
    return float(np.mean(diff ** 2))


def is_recovered(a, truth, tol=0.01):
    """True iff every piece lies within tol of its matched true piece (inclusive)"""
    if tol <= 0:
        raise InvalidInputError(f"Recovery tolerance must be positive, got {tol}")
    match = dist(a, truth)
    gaps = np.linalg.norm(a.matrix[list(match.permutation)] - truth.matrix, axis=1)
    return bool(np.all(gaps <= tol))


def _pairwise(ps):
    """Index arrays of all ordered pairs j != j'"""
    return np.where(~np.eye(ps.k, dtype=bool))


def init_condition(a, truth):
    """
    min over c > 0 of max_{j != j'} ||c (a_j - a_j') - (b*_j - b*_j')|| / ||theta*_j - theta*_j'||.

    The labels of a are first aligned to the truth with dist. The objective is
    a maximum of convex functions of c, so a ternary search on (0, c_upper]
    finds its minimum.
    """
    _check_pair(a, truth)
    if truth.k < 2:
        raise DegenerateParametersError("The initialization condition needs at least two pieces")

    aligned = a.matrix[list(dist(a, truth).permutation)]
    idx_a, idx_b = _pairwise(truth)
    init_diffs = aligned[idx_a] - aligned[idx_b]
    true_diffs = truth.matrix[idx_a] - truth.matrix[idx_b]
    slope_gaps = np.linalg.norm(truth.thetas[idx_a] - truth.thetas[idx_b], axis=1)
    if np.any(slope_gaps == 0.0):
        raise DegenerateParametersError("Two true pieces share the same slope")

    def objective(c):
        return float(np.max(np.linalg.norm(c * init_diffs - true_diffs, axis=1) / slope_gaps))

    largest_diff = float(np.max(np.linalg.norm(init_diffs, axis=1)))
    largest_truth = float(np.max(np.linalg.norm(truth.matrix, axis=1)))
    if largest_diff == 0.0 or largest_truth == 0.0:
        upper = 10.0
    else:
        upper = 10.0 * largest_truth / largest_diff

    lo, hi = 0.0, upper
    for _ in range(TERNARY_ITERATIONS):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if objective(m1) <= objective(m2):
            hi = m2
        else:
            lo = m1
    c_star = 0.5 * (lo + hi)
    value = objective(c_star)
    logger.debug(f"Initialization condition {value:.4g} at c={c_star:.4g}")
    return value
