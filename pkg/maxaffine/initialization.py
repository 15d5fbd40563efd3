"""
Initialization pipeline: a spectral (PCA) estimate of the span of the slopes,
followed by scale-invariant random search inside the lifted subspace.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .exceptions import InvalidInputError
from .model import ParamSet
from .numerics import as_generator, sample_unit_ball, sym_eig_desc

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SubspaceEstimate:
    """Top-k eigenvectors of the moment matrix and its full descending spectrum"""
    U_hat: np.ndarray
    eigenvalues: np.ndarray

    @property
    def k(self):
        return self.U_hat.shape[1]

    @property
    def d(self):
        return self.U_hat.shape[0]


@dataclass(frozen=True, eq=False)
class LiftedBasis:
    """V_hat = [[U_hat, 0], [0, 1]] with orthonormal columns"""
    V_hat: np.ndarray

    @property
    def dim(self):
        return self.V_hat.shape[1]

    @classmethod
    def identity(cls, d):
        return cls(V_hat=np.eye(d + 1))


class SearchResult(NamedTuple):
    params: ParamSet
    selected_index: int
    fits: np.ndarray


def moment_matrix(X, y):
    """
    M = M1 M1^T + M2 with M1 = mean(y_i x_i) and M2 = mean(y_i (x_i x_i^T - I)),
    symmetrized to absorb rounding.
    """
    m, d = X.shape
    m1 = X.T @ y / m
    m2 = (X.T * y) @ X / m - np.mean(y) * np.eye(d)
    M = np.outer(m1, m1) + m2
    return 0.5 * (M + M.T)


def pca_subspace(X, y, k):
    """
    Estimate the span of the true slopes from the first half of the samples.

    Args:
        X (ndarray): Covariates, shape (m, d)
        y (ndarray): Responses, shape (m,)
        k (int): Number of affine pieces

    Returns:
        SubspaceEstimate
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise InvalidInputError(f"Covariates of shape {X.shape} do not match {y.shape[0]} responses")
    m, d = X.shape
    if k < 1 or k > d:
        raise InvalidInputError(f"Need 1 <= k <= d for the spectral step, got k={k}, d={d}")
    if m < k:
        raise InvalidInputError(f"Need at least k={k} samples for the spectral step, got {m}")

    eigenvalues, eigenvectors = sym_eig_desc(moment_matrix(X, y))
    logger.debug(f"Spectral step: top eigenvalues {np.round(eigenvalues[:k + 1], 4).tolist()}")
    return SubspaceEstimate(U_hat=eigenvectors[:, :k], eigenvalues=eigenvalues)


def lift(sub):
    """Block matrix [[U_hat, 0], [0, 1]] of shape (d+1, k+1)"""
    return LiftedBasis(V_hat=linalg.block_diag(sub.U_hat, np.ones((1, 1))))


def optimal_scale(u, v):
    """argmin over c >= 0 of ||u - c v||^2, i.e. max(<u, v> / ||v||^2, 0); zero when v = 0"""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    if vv == 0.0:
        return 0.0
    return max(float(u @ v) / vv, 0.0)


def candidate_fits(candidates, Xi_hold, y_hold):
    """
    Scale-optimized goodness of fit of every candidate parameter set.

    Args:
        candidates (ndarray): Shape (M, k, d+1)
        Xi_hold (ndarray): Held-out appended covariates, shape (m, d+1)
        y_hold (ndarray): Held-out responses, shape (m,)

    Returns:
        ndarray: fits of shape (M,)
    """
    m = y_hold.shape[0]
    fits = np.empty(candidates.shape[0])
    for ell, betas in enumerate(candidates):
        v = (Xi_hold @ betas.T).max(axis=1)
        c = optimal_scale(y_hold, v)
        residual = y_hold - c * v
        fits[ell] = float(residual @ residual) / m
    return fits


def random_search(basis, Xi_hold, y_hold, k, M, rng):
    """
    Draw M candidate parameter sets inside the lifted subspace and keep the one
    whose best non-negative rescaling fits the held-out samples best.

    The selected parameters are returned unscaled. All draws happen up front,
    so the result does not depend on how the fits are evaluated.

    Returns:
        SearchResult: (params, selected_index, fits)
    """
    if M < 1:
        raise InvalidInputError(f"Need at least one candidate, got M={M}")
    Xi_hold = np.asarray(Xi_hold, dtype=float)
    y_hold = np.asarray(y_hold, dtype=float).reshape(-1)
    V = basis.V_hat
    if Xi_hold.ndim != 2 or Xi_hold.shape[1] != V.shape[0] or Xi_hold.shape[0] != y_hold.shape[0]:
        raise InvalidInputError(
            f"Held-out design of shape {Xi_hold.shape} does not match basis {V.shape} and {y_hold.shape[0]} responses"
        )
    if y_hold.shape[0] < 1:
        raise InvalidInputError("Random search needs at least one held-out sample")

    gen = as_generator(rng)
    nus = sample_unit_ball(basis.dim, gen, size=M * k).reshape(M, k, basis.dim)
    candidates = nus @ V.T

    fits = candidate_fits(candidates, Xi_hold, y_hold)
    best = int(np.argmin(fits))
    logger.debug(f"Random search: selected candidate {best} of {M} with fit {fits[best]:.6g}")
    return SearchResult(ParamSet.from_matrix(candidates[best]), best, fits)


def full_init(data, k, M, rng):
    """
    Split the samples, estimate the subspace on the first half (skipped when
    k >= d) and run the random search on the second half.
    """
    if data.n < 2:
        raise InvalidInputError(f"Initialization needs at least two samples, got {data.n}")
    first, second = data.split()
    gen = as_generator(rng)

    if k < data.d:
        basis = lift(pca_subspace(first.X, first.y, k))
    else:
        logger.info(f"k={k} >= d={data.d}: skipping the spectral step")
        basis = LiftedBasis.identity(data.d)

    return random_search(basis, second.Xi, second.y, k, M, gen).params
