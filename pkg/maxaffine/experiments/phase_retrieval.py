"""
Exact recovery of real phase retrieval by AM from a start near the truth.
"""

import logging

import numpy as np

from ..am import pr_run
from ..covariates import synthesize_pr
from ..numerics import as_generator, sample_unit_sphere
from .common import run_trials, trial_stream
from .table import ResultTable

logger = logging.getLogger(__name__)


def sign_error(theta, theta_star):
    """min over s in {-1, +1} of ||theta - s theta*||"""
    return float(min(np.linalg.norm(theta - theta_star), np.linalg.norm(theta + theta_star)))


def _pr_trial(cfg, dist, trial):
    stream = trial_stream(cfg, dist.value, trial)
    gen = as_generator(stream.child('truth'))
    theta_star = sample_unit_sphere(cfg.d, gen)
    data = synthesize_pr(theta_star, dist, cfg.n, cfg.sigma, stream.child('data'))
    direction = sample_unit_sphere(cfg.d, stream.child('init'))
    theta0 = theta_star + cfg.extra('init_scale', 0.2) * np.linalg.norm(theta_star) * direction
    trace = pr_run(theta0, data.X, data.y, cfg.T)
    return sign_error(trace.final, theta_star)


def phase_retrieval(cfg, threads=1):
    """Share of trials recovering theta* up to a global sign, per covariate distribution"""
    tol = cfg.extra('recovery_tol', 1e-8)
    rows = []
    for dist in cfg.extra('dist_list', (cfg.dist,)):
        logger.info(f"[{cfg.name}] {dist.value}: d={cfg.d}, n={cfg.n}, T={cfg.T}, {cfg.trials} trials")
        errors = np.array(run_trials(_pr_trial, [(cfg, dist, t) for t in range(cfg.trials)], threads))
        rows.append({
            'dist': dist.value,
            'd': cfg.d,
            'n': cfg.n,
            'sigma': float(cfg.sigma),
            'recovery_rate': float(np.mean(errors < tol)),
            'median_error': float(np.median(errors)),
            'max_error': float(errors.max()),
        })

    columns = ['dist', 'd', 'n', 'sigma', 'recovery_rate', 'median_error', 'max_error']
    return ResultTable(rows, columns, config=cfg)
