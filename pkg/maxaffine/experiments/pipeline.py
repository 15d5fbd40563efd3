"""
Initialization experiments: the spectral subspace rate and the full
spectral + random search + AM pipeline against random-restart AM.
"""

import logging

import numpy as np

from ..am import am_run, rand_am_baseline
from ..covariates import generic_low_rank_truth, synthesize
from ..initialization import full_init, pca_subspace
from ..metrics import dist, subspace_error
from .common import n_from_ratio, run_trials, trial_stream
from .table import ResultTable

logger = logging.getLogger(__name__)


def _subspace_trial(cfg, d, n, trial):
    stream = trial_stream(cfg, 'd', d, 'n', n, trial)
    truth, U_star = generic_low_rank_truth(cfg.k, d, stream.child('truth'))
    data = synthesize(truth, cfg.dist, n, cfg.sigma, stream.child('data'))
    estimate = pca_subspace(data.X, data.y, cfg.k)
    return subspace_error(estimate.U_hat, U_star)


def run_pca_rate(cfg, threads=1):
    """Mean ||U_hat U_hat^T - U* U*^T||_F^2 over a grid of (d, 5d/n)"""
    rows = []
    for d in cfg.d_grid or (cfg.d,):
        for ratio in cfg.extra('ratio_grid', ()):
            n = n_from_ratio(d, ratio)
            logger.info(f"[{cfg.name}] d={d}, 5d/n={ratio} (n={n}): {cfg.trials} trials")
            errors = np.array(run_trials(_subspace_trial, [(cfg, d, n, t) for t in range(cfg.trials)], threads))
            rows.append({
                'd': d,
                'ratio': float(ratio),
                'n': n,
                'mean_subspace_error': float(errors.mean()),
                'std_subspace_error': float(errors.std()),
            })

    columns = ['d', 'ratio', 'n', 'mean_subspace_error', 'std_subspace_error']
    return ResultTable(rows, columns, config=cfg)


def _overall_trial(cfg, M_grid, trial):
    stream = trial_stream(cfg, trial)
    truth, _ = generic_low_rank_truth(cfg.k, cfg.d, stream.child('truth'))
    data = synthesize(truth, cfg.dist, cfg.n, cfg.sigma, stream.child('data'))

    results = []
    for M in M_grid:
        init = full_init(data, cfg.k, M, stream.child('search', M))
        pipeline = am_run(init, data.Xi, data.y, cfg.T).final
        baseline = rand_am_baseline(data, cfg.k, M, cfg.T, stream.child('baseline', M)).params
        results.append((dist(pipeline, truth).value, dist(baseline, truth).value))
    return results


def run_overall(cfg, threads=1):
    """Estimation error of the full pipeline and of random-restart AM for every M"""
    M_grid = tuple(cfg.extra('M_grid', (cfg.extra('M', 70),)))
    logger.info(f"[{cfg.name}] k={cfg.k}, d={cfg.d}, n={cfg.n}, M in {list(M_grid)}: {cfg.trials} trials")
    results = np.array(run_trials(_overall_trial, [(cfg, M_grid, t) for t in range(cfg.trials)], threads))

    rows = []
    for idx, M in enumerate(M_grid):
        pipeline_errors = results[:, idx, 0]
        baseline_errors = results[:, idx, 1]
        rows.append({
            'M': M,
            'pipeline_error': float(pipeline_errors.mean()),
            'pipeline_median': float(np.median(pipeline_errors)),
            'baseline_error': float(baseline_errors.mean()),
            'baseline_median': float(np.median(baseline_errors)),
        })

    columns = ['M', 'pipeline_error', 'pipeline_median', 'baseline_error', 'baseline_median']
    return ResultTable(rows, columns, config=cfg)
