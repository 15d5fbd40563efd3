"""
The max-affine model: parameters, evaluation, the argmax partition
and the geometric quantities (pi_min, separation, conditioning, Bmax).
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import (
    DegenerateParametersError,
    GeometryUndefinedError,
    InvalidInputError,
)
from .numerics import as_generator

logger = logging.getLogger(__name__)

MIN_MC_SAMPLES = 1000


@dataclass(frozen=True, eq=False)
class AffineParam:
    """One affine piece x -> <theta, x> + intercept"""
    theta: np.ndarray
    intercept: float

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).reshape(-1)
        if not np.all(np.isfinite(theta)) or not math.isfinite(float(self.intercept)):
            raise InvalidInputError("Affine parameters must be finite")
        theta.setflags(write=False)
        object.__setattr__(self, 'theta', theta)
        object.__setattr__(self, 'intercept', float(self.intercept))

    @property
    def beta(self):
        """The appended parameter (theta, intercept) in R^(d+1)"""
        return np.append(self.theta, self.intercept)


@dataclass(frozen=True, eq=False)
class ParamSet:
    """An ordered list of k affine pieces sharing the same dimension d"""
    params: tuple

    def __post_init__(self):
        params = tuple(self.params)
        if not params:
            raise InvalidInputError("A parameter set needs at least one piece")
        dims = {p.theta.shape[0] for p in params}
        if len(dims) != 1:
            raise InvalidInputError(f"All pieces must share one dimension, got {sorted(dims)}")
        object.__setattr__(self, 'params', params)

    @classmethod
    def from_matrix(cls, betas):
        """Build from a (k, d+1) matrix whose rows are (theta_j, b_j)"""
        betas = np.asarray(betas, dtype=float)
        if betas.ndim != 2 or betas.shape[1] < 2:
            raise InvalidInputError(f"Expected a (k, d+1) matrix with d >= 1, got shape {betas.shape}")
        return cls(tuple(AffineParam(row[:-1], row[-1]) for row in betas))

    @classmethod
    def standard_basis(cls, k, d):
        """theta_j = e_j in R^d with zero intercepts (requires k <= d)"""
        if k > d:
            raise InvalidInputError(f"Standard basis needs k <= d, got k={k}, d={d}")
        betas = np.zeros((k, d + 1))
        betas[np.arange(k), np.arange(k)] = 1.0
        return cls.from_matrix(betas)

    @classmethod
    def cone(cls, alpha):
        """
        Three pieces in R^2 where piece 0 wins on the cone
        {x1 >= 0, |x2| <= x1 tan(alpha)}, so pi_min = alpha / pi.
        """
        if not 0.0 < alpha <= math.pi / 3:
            raise InvalidInputError(f"Cone angle must lie in (0, pi/3], got {alpha}")
        return cls.from_matrix([
            [math.sin(alpha), 0.0, 0.0],
            [0.0, math.cos(alpha), 0.0],
            [0.0, -math.cos(alpha), 0.0],
        ])

    @property
    def k(self):
        return len(self.params)

    @property
    def d(self):
        return self.params[0].theta.shape[0]

    @cached_property
    def matrix(self):
        """Rows (theta_j, b_j), shape (k, d+1); read-only"""
        betas = np.vstack([p.beta for p in self.params])
        betas.setflags(write=False)
        return betas

    @property
    def thetas(self):
        return self.matrix[:, :-1]

    @property
    def intercepts(self):
        return self.matrix[:, -1]

    def relabel(self, perm):
        """Return the set whose j-th piece is piece perm[j] of this one"""
        return ParamSet(tuple(self.params[int(j)] for j in perm))

    def scaled(self, c):
        return ParamSet.from_matrix(c * self.matrix)


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of every sample to exactly one of k labels"""
    assignment: np.ndarray
    k: int

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=np.intp)
        assignment.setflags(write=False)
        object.__setattr__(self, 'assignment', assignment)

    @property
    def n(self):
        return self.assignment.shape[0]

    @cached_property
    def subsets(self):
        """Index arrays S_0..S_{k-1}"""
        return [np.flatnonzero(self.assignment == j) for j in range(self.k)]

    def sizes(self):
        return np.bincount(self.assignment, minlength=self.k)


@dataclass(frozen=True, eq=False)
class GeometryReport:
    """pi, pi_min, separation, conditioning and Bmax of a parameter set"""
    pi: np.ndarray
    pi_min: float
    delta: float
    kappa: float
    b_max: float
    mc_samples: int
    mc_stderr: float = field(default=0.0)


def append_one(x):
    """xi = (x, 1)"""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size == 0:
        raise InvalidInputError("Covariate vector must have at least one entry")
    return np.append(x, 1.0)


def append_ones(X):
    """Append a column of ones to a covariate matrix"""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] == 0:
        raise InvalidInputError(f"Expected an (n, d) matrix with d >= 1, got shape {X.shape}")
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _check_appended(ps, Xi):
    Xi = np.asarray(Xi, dtype=float)
    if Xi.ndim == 1:
        Xi = Xi.reshape(1, -1)
    if Xi.shape[1] != ps.d + 1:
        raise InvalidInputError(
            f"Appended covariates have {Xi.shape[1]} columns, parameters need {ps.d + 1}"
        )
    return Xi


def eval_max_affine(ps, xi):
    """max_j <xi, beta_j> for a single appended covariate xi"""
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape[0] != ps.d + 1:
        raise InvalidInputError(f"Covariate has {xi.shape[0]} entries, parameters need {ps.d + 1}")
    return float(np.max(ps.matrix @ xi))


def scores(ps, Xi):
    """All inner products <xi_i, beta_j>, shape (n, k)"""
    Xi = _check_appended(ps, Xi)
    return Xi @ ps.matrix.T


def predict(ps, Xi):
    """Vectorized max-affine evaluation over the rows of Xi"""
    return scores(ps, Xi).max(axis=1)


def partition(ps, Xi):
    """
    Assign each row of Xi to the smallest label attaining the maximum.

    Ties use exact floating-point equality; np.argmax already returns the
    first maximal index.
    """
    return Partition(np.argmax(scores(ps, Xi), axis=1), ps.k)


def _slope_gaps(ps):
    thetas = ps.thetas
    diffs = thetas[:, None, :] - thetas[None, :, :]
    return np.sum(diffs ** 2, axis=-1)


def geometry(ps, dist, mc_samples, rng):
    """
    Monte-Carlo pi and the closed-form separation, conditioning and Bmax.

    Args:
        ps (ParamSet): Parameters to describe
        dist: CovariateDist, its name, or anything with sample(n, d, rng)
        mc_samples (int): Number of covariate draws, at least 1000
        rng: RngStream or numpy Generator

    Returns:
        GeometryReport
    """
    if mc_samples < MIN_MC_SAMPLES:
        raise InvalidInputError(f"Need at least {MIN_MC_SAMPLES} Monte-Carlo samples, got {mc_samples}")

    b_max = float(np.max(np.linalg.norm(ps.matrix, axis=1)))
    stderr = 1.0 / (2.0 * math.sqrt(mc_samples))

    if ps.k == 1:
        report = GeometryReport(
            pi=np.ones(1), pi_min=1.0, delta=math.nan, kappa=math.nan,
            b_max=b_max, mc_samples=mc_samples, mc_stderr=stderr,
        )
        raise GeometryUndefinedError("Separation and conditioning need at least two pieces", report=report)

    gaps = _slope_gaps(ps)
    off_diag = ~np.eye(ps.k, dtype=bool)
    delta = float(gaps[off_diag].min())
    if delta == 0.0:
        raise DegenerateParametersError("Two pieces share the same slope; minimum separation is zero")

    masked = np.where(off_diag, gaps, np.nan)
    kappa = float(np.max(np.nanmax(masked, axis=1) / np.nanmin(masked, axis=1)))

    if isinstance(dist, str):
        # covariates imports this module
        from .covariates import CovariateDist
        dist = CovariateDist.from_name(dist)
    X = dist.sample(mc_samples, ps.d, as_generator(rng))
    sizes = partition(ps, append_ones(X)).sizes()
    pi = sizes / float(mc_samples)

    logger.debug(f"Geometry: pi={np.round(pi, 4).tolist()}, delta={delta:.4g}, kappa={kappa:.4g}")
    return GeometryReport(
        pi=pi, pi_min=float(pi.min()), delta=delta, kappa=kappa,
        b_max=b_max, mc_samples=mc_samples, mc_stderr=stderr,
    )
