"""
Alternating minimization for max-affine regression and for real phase retrieval.

Both loops run on the full data in every iteration; callers choose the
number of iterations T.
"""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidInputError
from .model import ParamSet, partition, predict
from .numerics import as_generator, sample_unit_ball, solve_min_norm_ls

logger = logging.getLogger(__name__)


@dataclass
class AmTrace:
    """Iterates 0..T, the partitions that produced iterates 1..T and the objective of each iterate"""
    iterates: list = field(default_factory=list)
    partitions: list = field(default_factory=list)
    objective: list = field(default_factory=list)

    @property
    def final(self):
        return self.iterates[-1]

    @property
    def T(self):
        return len(self.partitions)


@dataclass
class PrTrace:
    """Phase-retrieval iterates theta^(0)..theta^(T) and the sign vectors used at each step"""
    iterates: list = field(default_factory=list)
    signs: list = field(default_factory=list)

    @property
    def final(self):
        return self.iterates[-1]


def _check_data(Xi, y, cols):
    Xi = np.asarray(Xi, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if Xi.ndim != 2 or Xi.shape[0] != y.shape[0]:
        raise InvalidInputError(f"Design of shape {Xi.shape} does not match {y.shape[0]} responses")
    if Xi.shape[1] != cols:
        raise InvalidInputError(f"Design has {Xi.shape[1]} columns, expected {cols}")
    return Xi, y


def least_squares_objective(ps, Xi, y):
    """sum_i (y_i - max_j <xi_i, beta_j>)^2"""
    residuals = np.asarray(y, dtype=float) - predict(ps, Xi)
    return float(residuals @ residuals)


def am_step(ps, Xi, y):
    """
    One alternating-minimization update.

    Partition the samples by the current argmax, then refit every non-empty
    subset by minimum-norm least squares. Pieces with an empty subset keep
    their current parameters.

    Returns:
        tuple: (ParamSet, Partition)
    """
    Xi, y = _check_data(Xi, y, ps.d + 1)
    part = partition(ps, Xi)
    betas = np.array(ps.matrix)

    for j, rows in enumerate(part.subsets):
        if rows.size == 0:
            logger.debug(f"Piece {j} owns no samples; keeping its parameters")
            continue
        betas[j] = solve_min_norm_ls(Xi[rows], y[rows])

    return ParamSet.from_matrix(betas), part


def am_run(ps0, Xi, y, T):
    """Apply am_step T times from ps0 and record the whole trajectory"""
    if T < 0:
        raise InvalidInputError(f"Number of iterations must be non-negative, got {T}")
    Xi, y = _check_data(Xi, y, ps0.d + 1)

    trace = AmTrace(iterates=[ps0], objective=[least_squares_objective(ps0, Xi, y)])
    ps = ps0
    for t in range(T):
        ps, part = am_step(ps, Xi, y)
        trace.iterates.append(ps)
        trace.partitions.append(part)
        trace.objective.append(least_squares_objective(ps, Xi, y))
        logger.debug(f"AM iteration {t + 1}/{T}: objective={trace.objective[-1]:.6g}")
    return trace


def am_run_until(ps0, Xi, y, T, tol):
    """
    am_run with a convergence tolerance layered on top: stop as soon as no
    coordinate of any piece moves by more than tol, or after T iterations.
    """
    if tol < 0:
        raise InvalidInputError(f"Tolerance must be non-negative, got {tol}")
    Xi, y = _check_data(Xi, y, ps0.d + 1)

    trace = AmTrace(iterates=[ps0], objective=[least_squares_objective(ps0, Xi, y)])
    ps = ps0
    for t in range(T):
        nxt, part = am_step(ps, Xi, y)
        trace.iterates.append(nxt)
        trace.partitions.append(part)
        trace.objective.append(least_squares_objective(nxt, Xi, y))
        moved = float(np.max(np.abs(nxt.matrix - ps.matrix)))
        ps = nxt
        if moved <= tol:
            logger.debug(f"AM converged after {t + 1} iterations (max move {moved:.3g})")
            break
    return trace


class BaselineResult(NamedTuple):
    params: ParamSet
    selected_index: int
    objectives: np.ndarray


def rand_am_baseline(data, k, M, T, rng):
    """
    AM with repeated random initialization: M runs from parameters drawn
    uniformly on the unit ball, keeping the run with the smallest final
    least-squares objective (smallest index on ties).
    """
    if M < 1:
        raise InvalidInputError(f"Need at least one restart, got M={M}")
    gen = as_generator(rng)
    starts = sample_unit_ball(data.d + 1, gen, size=M * k).reshape(M, k, data.d + 1)

    objectives = np.empty(M)
    finals = []
    for ell, start in enumerate(starts):
        trace = am_run(ParamSet.from_matrix(start), data.Xi, data.y, T)
        objectives[ell] = trace.objective[-1]
        finals.append(trace.final)

    best = int(np.argmin(objectives))
    logger.debug(f"Random-restart AM: run {best} of {M} wins with objective {objectives[best]:.6g}")
    return BaselineResult(finals[best], best, objectives)


def _signs(theta, X):
    # sgn(0) = +1
    return np.where(X @ theta >= 0.0, 1.0, -1.0)


def pr_step(theta, X, y):
    """
    One phase-retrieval AM update: fix the signs s_i = sgn(<x_i, theta>) and
    solve the least-squares problem with rows s_i x_i.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    X, y = _check_data(X, y, theta.shape[0])
    signs = _signs(theta, X)
    return solve_min_norm_ls(signs[:, None] * X, y)


def pr_run(theta0, X, y, T):
    """T applications of pr_step with the full trace"""
    if T < 0:
        raise InvalidInputError(f"Number of iterations must be non-negative, got {T}")
    theta = np.asarray(theta0, dtype=float).reshape(-1)
    X, y = _check_data(X, y, theta.shape[0])

    trace = PrTrace(iterates=[theta])
    for _ in range(T):
        signs = _signs(theta, X)
        theta = solve_min_norm_ls(signs[:, None] * X, y)
        trace.signs.append(signs)
        trace.iterates.append(theta)
    return trace
