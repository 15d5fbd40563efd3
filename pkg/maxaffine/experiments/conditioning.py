"""
Conditioning of the covariates that land in the narrow cone of the three-piece
construction: the second-moment matrix of a standard Gaussian truncated to
{x1 >= 0, |x2| <= x1 tan(alpha)}.
"""

import logging
import math

import numpy as np

from ..exceptions import ConfigValidationError, InsufficientSamplesError
from ..numerics import sym_eig_desc
from .table import ResultTable
from .common import trial_stream

logger = logging.getLogger(__name__)

MIN_RETAINED = 500


def cone_moments(alpha):
    """Closed-form E[W1^2] and E[W2^2] for the truncated Gaussian W"""
    ratio = math.sin(2.0 * alpha) / (2.0 * alpha)
    return 1.0 + ratio, 1.0 - ratio


def truncated_second_moment(alpha, samples, rng):
    """
    Empirical second-moment matrix of Gaussian draws falling in the cone.

    Returns:
        tuple: (moment matrix (2, 2), retained count, standard error of the cross moment)
    """
    X = rng.standard_normal((samples, 2))
    inside = (X[:, 0] >= 0.0) & (np.abs(X[:, 1]) <= X[:, 0] * math.tan(alpha))
    W = X[inside]
    retained = W.shape[0]
    if retained < MIN_RETAINED:
        raise InsufficientSamplesError(
            f"Only {retained} of {samples} draws fell in the cone for alpha={alpha:.4g}; need {MIN_RETAINED}"
        )
    moment = W.T @ W / retained
    products = W[:, 0] * W[:, 1]
    stderr = float(products.std(ddof=1) / math.sqrt(retained))
    return moment, retained, stderr


def cone_conditioning(cfg, threads=1):
    """Eigenvalues and cross moment of the truncated second-moment matrix for each alpha"""
    samples = cfg.extra('mc_samples', 200000)
    rows = []
    for alpha in cfg.extra('alpha_list', ()):
        if not 0.0 < alpha < math.pi / 4:
            raise ConfigValidationError(f"Cone angle must lie in (0, pi/4), got {alpha}")
        rng = trial_stream(cfg, 'alpha', repr(float(alpha))).generator()
        moment, retained, stderr = truncated_second_moment(alpha, samples, rng)
        eigenvalues, _ = sym_eig_desc(moment)
        theory_1, theory_2 = cone_moments(alpha)
        logger.info(f"[{cfg.name}] alpha={alpha:.4f}: retained {retained}, eigenvalues {eigenvalues.round(5).tolist()}")
        rows.append({
            'alpha': float(alpha),
            'retained': retained,
            'lambda1': float(eigenvalues[0]),
            'lambda2': float(eigenvalues[1]),
            'lambda1_theory': theory_1,
            'lambda2_theory': theory_2,
            'lambda1_ratio': float(eigenvalues[0]) / theory_1,
            'lambda2_over_alpha_sq': float(eigenvalues[1]) / alpha ** 2,
            'cross_moment': float(moment[0, 1]),
            'cross_stderr': stderr,
        })

    columns = [
        'alpha', 'retained', 'lambda1', 'lambda2', 'lambda1_theory', 'lambda2_theory',
        'lambda1_ratio', 'lambda2_over_alpha_sq', 'cross_moment', 'cross_stderr',
    ]
    return ResultTable(rows, columns, config=cfg)
