"""
Pieces shared by the experiment harnesses: the perturbed start, per-trial
random streams, the trial runner and small fitting helpers.
"""

import math

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from ..exceptions import InvalidInputError
from ..model import ParamSet
from ..numerics import RngStream, as_generator, sample_unit_sphere, stream_id_for

# x-axis of the rate plots is 5d/n
RATIO_FACTOR = 5

DEFAULT_RADIUS = 0.3


def perturbed_init(truth, r, rng):
    """beta0_j = beta*_j + r g_j with g_j uniform on the unit sphere in R^(d+1)"""
    if r < 0:
        raise InvalidInputError(f"Perturbation radius must be non-negative, got {r}")
    directions = sample_unit_sphere(truth.d + 1, as_generator(rng), size=truth.k)
    return ParamSet.from_matrix(truth.matrix + r * directions)


def trial_stream(cfg, *keys):
    """Per-trial stream keyed by experiment name, grid point and trial index"""
    return RngStream(cfg.seed, stream_id_for(cfg.name, *keys))


def run_trials(func, arguments, threads=1):
    """
    Run func(*args) for every tuple in arguments, possibly on several threads.
    Results come back in submission order.
    """
    arguments = list(arguments)
    if threads <= 1 or len(arguments) <= 1:
        return [func(*args) for args in arguments]
    return Parallel(n_jobs=threads, prefer='threads')(delayed(func)(*args) for args in arguments)


def n_from_ratio(d, ratio):
    """Sample size n with 5d/n = ratio"""
    return max(1, int(round(RATIO_FACTOR * d / ratio)))


def linear_fit(x, y):
    """Least-squares line through (x, y): (slope, intercept, r squared); NaNs when under-determined"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.all(x == x[0]):
        return math.nan, math.nan, math.nan
    fit = stats.linregress(x, y)
    return float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2)


def estimation_error(params, truth):
    """sum_j ||beta_j - beta*_j||^2 with the labels kept as they are"""
    return float(np.sum((params.matrix - truth.matrix) ** 2))
