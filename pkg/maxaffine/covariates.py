"""
Covariate distributions, noise and synthetic datasets for the max-affine
and real phase-retrieval models.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd

from .exceptions import InvalidInputError
from .model import ParamSet, append_ones, predict
from .numerics import as_generator

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'

SQRT3 = math.sqrt(3.0)
BINOMIAL_TRIALS = 10
BINOMIAL_P = 0.4
BINOMIAL_MEAN = BINOMIAL_TRIALS * BINOMIAL_P
BINOMIAL_SCALE = math.sqrt(BINOMIAL_TRIALS * BINOMIAL_P * (1 - BINOMIAL_P))


class CovariateDist(str, Enum):
    """Isotropic product distributions: every coordinate has mean 0 and variance 1"""
    GAUSSIAN = 'gaussian'
    UNIFORM_CUBE = 'uniform_cube'
    RADEMACHER = 'rademacher'
    CENTERED_BINOMIAL = 'centered_binomial'

    @classmethod
    def from_name(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace('-', '_')
        for member in cls:
            if member.value == key:
                return member
        raise InvalidInputError(
            f"Unknown covariate distribution '{name}'. Choose from: {', '.join(m.value for m in cls)}"
        )

    def sample(self, n, d, rng):
        """Draw an (n, d) matrix of i.i.d. coordinates"""
        if n < 1 or d < 1:
            raise InvalidInputError(f"Need n >= 1 and d >= 1, got n={n}, d={d}")
        gen = as_generator(rng)
        if self is CovariateDist.GAUSSIAN:
            return gen.standard_normal((n, d))
        if self is CovariateDist.UNIFORM_CUBE:
            return gen.uniform(-SQRT3, SQRT3, size=(n, d))
        if self is CovariateDist.RADEMACHER:
            return 2.0 * gen.integers(0, 2, size=(n, d)).astype(float) - 1.0
        # (Bin(10, 0.4) - 4) / sqrt(2.4)
        counts = gen.binomial(BINOMIAL_TRIALS, BINOMIAL_P, size=(n, d))
        return (counts - BINOMIAL_MEAN) / BINOMIAL_SCALE


@dataclass(frozen=True, eq=False)
class Dataset:
    """Covariates X, appended covariates Xi, responses y and the generating truth"""
    X: np.ndarray
    Xi: np.ndarray
    y: np.ndarray
    sigma: float = 0.0
    truth: ParamSet = None

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] < 1:
            raise InvalidInputError(f"Dataset needs at least one row, got X of shape {self.X.shape}")
        if self.y.shape != (self.X.shape[0],):
            raise InvalidInputError(f"Responses of shape {self.y.shape} do not match {self.X.shape[0]} rows")
        if self.sigma < 0:
            raise InvalidInputError(f"Noise level must be non-negative, got {self.sigma}")

    @classmethod
    def from_arrays(cls, X, y, sigma=0.0, truth=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidInputError("Dataset contains non-finite values")
        return cls(X=X, Xi=append_ones(X), y=y, sigma=float(sigma), truth=truth)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    def subset(self, rows):
        return Dataset(X=self.X[rows], Xi=self.Xi[rows], y=self.y[rows], sigma=self.sigma, truth=self.truth)

    def split(self):
        """First ceil(n/2) samples and the rest"""
        half = (self.n + 1) // 2
        return self.subset(slice(0, half)), self.subset(slice(half, None))

    def to_csv(self, path):
        """Write columns x1..xd,y with 17 significant digits"""
        columns = [f"x{j + 1}" for j in range(self.d)]
        frame = pd.DataFrame(self.X, columns=columns)
        frame['y'] = self.y
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        logger.info(f"Wrote dataset with n={self.n}, d={self.d} to {path}")

    @classmethod
    def from_csv(cls, path, sigma=0.0):
        """Read a dataset written by to_csv (header x1..xd,y)"""
        frame = pd.read_csv(path, comment='#')
        if 'y' not in frame.columns:
            raise InvalidInputError(f"{path}: missing 'y' column")
        feature_columns = [col for col in frame.columns if col != 'y']
        if not feature_columns:
            raise InvalidInputError(f"{path}: no covariate columns")
        expected = [f"x{j + 1}" for j in range(len(feature_columns))]
        if feature_columns != expected:
            raise InvalidInputError(f"{path}: expected covariate columns {expected}, got {feature_columns}")
        try:
            X = frame[feature_columns].to_numpy(dtype=float)
            y = frame['y'].to_numpy(dtype=float)
        except ValueError as e:
            raise InvalidInputError(f"{path}: non-numeric entries ({e})") from e
        logger.info(f"Loaded dataset with n={X.shape[0]}, d={X.shape[1]} from {path}")
        return cls.from_arrays(X, y, sigma=sigma)


def sample_covariates(dist, n, d, rng):
    """i.i.d. rows from the named covariate distribution"""
    return CovariateDist.from_name(dist).sample(n, d, rng)


def _noise(gen, n, sigma):
    if sigma < 0:
        raise InvalidInputError(f"Noise level must be non-negative, got {sigma}")
    # Always draw so that X and the noise stream line up across sigma values
    return sigma * gen.standard_normal(n)


def synthesize(ps, dist, n, sigma, rng):
    """
    Draw n samples y_i = max_j <xi_i, beta_j> + N(0, sigma^2).

    Args:
        ps (ParamSet): Generating parameters, recorded as the truth
        dist (CovariateDist|str): Covariate distribution
        n (int): Number of samples
        sigma (float): Noise standard deviation
        rng: RngStream or numpy Generator

    Returns:
        Dataset
    """
    gen = as_generator(rng)
    X = sample_covariates(dist, n, ps.d, gen)
    Xi = append_ones(X)
    y = predict(ps, Xi) + _noise(gen, n, sigma)
    return Dataset(X=X, Xi=Xi, y=y, sigma=float(sigma), truth=ps)


def synthesize_pr(theta_star, dist, n, sigma, rng):
    """Draw n samples y_i = |<x_i, theta*>| + N(0, sigma^2)"""
    theta_star = np.asarray(theta_star, dtype=float).reshape(-1)
    gen = as_generator(rng)
    X = sample_covariates(dist, n, theta_star.shape[0], gen)
    y = np.abs(X @ theta_star) + _noise(gen, n, sigma)
    truth = ParamSet.from_matrix(np.append(theta_star, 0.0).reshape(1, -1))
    return Dataset(X=X, Xi=append_ones(X), y=y, sigma=float(sigma), truth=truth)


def random_orthonormal(d, k, rng):
    """A d x k matrix with orthonormal columns (QR of a Gaussian matrix, sign-fixed)"""
    gen = as_generator(rng)
    Q, R = np.linalg.qr(gen.standard_normal((d, k)))
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def generic_low_rank_truth(k, d, rng):
    """
    Theta* = A* U*^T with A* a random orthogonal k x k matrix and U* a random
    orthonormal d x k frame; intercepts are zero.

    Returns:
        tuple: (ParamSet, U_star)
    """
    if k > d:
        raise InvalidInputError(f"Low-rank truth needs k <= d, got k={k}, d={d}")
    gen = as_generator(rng)
    U_star = random_orthonormal(d, k, gen)
    A_star = random_orthonormal(k, k, gen)
    thetas = A_star @ U_star.T
    betas = np.hstack([thetas, np.zeros((k, 1))])
    return ParamSet.from_matrix(betas), U_star
