"""
Deterministic linear-algebra primitives and seeded randomness.
Matrices and vectors are plain numpy arrays; nothing here keeps state.
"""

import hashlib
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .exceptions import InvalidInputError

logger = logging.getLogger(__name__)

# Singular values at or below this fraction of the largest are treated as zero
SVD_CUTOFF = 1e-12

# Relative asymmetry tolerated by sym_eig_desc
SYMMETRY_TOL = 1e-10

# Eigenvector coordinates below this magnitude never decide the sign
SIGN_TOL = 1e-12


@dataclass(frozen=True)
class RngStream:
    """
    A (seed, stream id) pair naming an independent random stream.

    Identical pairs give identical draws; distinct stream ids give
    statistically independent draws.
    """
    seed: int
    stream_id: int = 0

    def generator(self):
        """Return a fresh numpy Generator positioned at the start of the stream"""
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.default_rng(seq)

    def child(self, *keys):
        """Derive a stream keyed by this stream id and extra keys"""
        return RngStream(self.seed, stream_id_for(self.stream_id, *keys))


def stream_id_for(*keys):
    """Hash experiment name, grid point and trial index to a 64-bit stream id"""
    text = '/'.join(str(key) for key in keys)
    digest = hashlib.blake2b(text.encode('utf-8'), digest_size=8).digest()
    return int.from_bytes(digest, 'little')


def as_generator(rng):
    """Accept an RngStream, a numpy Generator or an int seed"""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise InvalidInputError(f"Cannot build a random generator from {type(rng).__name__}")


def _check_finite(name, array):
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} contains non-finite entries")


def solve_min_norm_ls(A, b):
    """
    Minimum-norm least-squares solution of A x ~ b.

    Computed through a thin SVD; singular values at or below
    SVD_CUTOFF * sigma_max are dropped, so rank-deficient systems return
    the minimizer of smallest Euclidean norm.

    Args:
        A (ndarray): Design matrix, shape (m, p)
        b (ndarray): Response, shape (m,)

    Returns:
        ndarray: Solution of shape (p,)
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInputError(f"Expected a non-empty 2-D matrix, got shape {A.shape}")
    if b.shape != (A.shape[0],):
        raise InvalidInputError(f"Response of shape {b.shape} does not match matrix with {A.shape[0]} rows")
    _check_finite('matrix', A)
    _check_finite('response', b)

    U, s, Vt = linalg.svd(A, full_matrices=False, lapack_driver='gesdd')
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(A.shape[1])

    keep = s > SVD_CUTOFF * s[0]
    if not np.all(keep):
        logger.debug(f"Rank-deficient solve: rank {int(keep.sum())} of {A.shape[1]} columns")
    coeffs = (U[:, keep].T @ b) / s[keep]
    return Vt[keep].T @ coeffs


def sym_eig_desc(S):
    """
    Eigendecomposition of a symmetric matrix with eigenvalues in descending order.

    The first coordinate of each eigenvector whose magnitude exceeds
    SIGN_TOL is made positive so repeated runs agree bit for bit.

    Returns:
        tuple: (eigenvalues of shape (p,), eigenvectors as columns of a (p, p) matrix)
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidInputError(f"Expected a square matrix, got shape {S.shape}")
    _check_finite('matrix', S)

    scale = np.linalg.norm(S)
    if np.linalg.norm(S - S.T) > SYMMETRY_TOL * scale:
        raise InvalidInputError("Matrix is not symmetric within tolerance")

    eigenvalues, eigenvectors = linalg.eigh(S)
    # eigh is ascending; flip both so that index 0 is the largest
    eigenvalues = eigenvalues[::-1].copy()
    eigenvectors = eigenvectors[:, ::-1].copy()

    for col in range(eigenvectors.shape[1]):
        vec = eigenvectors[:, col]
        significant = np.flatnonzero(np.abs(vec) > SIGN_TOL)
        if significant.size and vec[significant[0]] < 0:
            eigenvectors[:, col] = -vec

    return eigenvalues, eigenvectors


def sample_unit_sphere(dim, rng, size=None):
    """Uniform draw(s) on the unit sphere in R^dim (normalized Gaussians)"""
    if dim < 1:
        raise InvalidInputError(f"Dimension must be at least 1, got {dim}")
    gen = as_generator(rng)
    shape = (dim,) if size is None else (size, dim)
    g = gen.standard_normal(shape)
    norms = np.linalg.norm(g, axis=-1, keepdims=True)
    # zero-norm draws stay zero
    norms[norms == 0.0] = 1.0
    return g / norms


def sample_unit_ball(dim, rng, size=None):
    """
    Uniform draw(s) on the Euclidean unit ball in R^dim.

    Direction is a normalized Gaussian, radius is U^(1/dim).
    With size=None a single vector is returned, otherwise an array (size, dim).
    """
    gen = as_generator(rng)
    directions = sample_unit_sphere(dim, gen, size=size)
    radii = gen.random(() if size is None else (size, 1)) ** (1.0 / dim)
    return directions * radii
