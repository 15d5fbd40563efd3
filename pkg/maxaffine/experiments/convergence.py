"""
AM convergence experiments started near the truth: error trajectories over
iterations, the d/n rate and the dependence on pi_min.
"""

import logging
import math

import numpy as np

from ..am import am_run
from ..covariates import synthesize
from ..metrics import dist
from ..model import ParamSet
from .common import (
    DEFAULT_RADIUS,
    estimation_error,
    linear_fit,
    n_from_ratio,
    perturbed_init,
    run_trials,
    trial_stream,
)
from .conditioning import cone_moments
from .table import ResultTable

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-10

# ParamSet.cone lists the rare piece first; its x2 slope runs across the cone
RARE_PIECE = 0
TRANSVERSE = 1


def _trajectory_trial(cfg, sigma, trial):
    stream = trial_stream(cfg, 'sigma', sigma, trial)
    truth = ParamSet.standard_basis(cfg.k, cfg.d)
    data = synthesize(truth, cfg.dist, cfg.n, sigma, stream.child('data'))
    init = perturbed_init(truth, cfg.extra('r', DEFAULT_RADIUS), stream.child('init'))
    trace = am_run(init, data.Xi, data.y, cfg.T)

    final = trace.final.matrix
    opt_errors = np.array([np.sum((ps.matrix - final) ** 2) for ps in trace.iterates])
    est_errors = np.array([estimation_error(ps, truth) for ps in trace.iterates])
    return opt_errors, est_errors


def run_convergence(cfg, threads=1):
    """
    Mean optimization error sum_j ||beta^(t) - beta^(T)||^2 and estimation error
    sum_j ||beta^(t) - beta*||^2 (also divided by sigma^2) for every sigma and t.
    """
    rows = []
    for sigma in cfg.sigma_list or (cfg.sigma,):
        logger.info(f"[{cfg.name}] sigma={sigma}: {cfg.trials} trials, k={cfg.k}, d={cfg.d}, n={cfg.n}, T={cfg.T}")
        results = run_trials(_trajectory_trial, [(cfg, sigma, t) for t in range(cfg.trials)], threads)
        opt = np.array([r[0] for r in results])
        est = np.array([r[1] for r in results])
        for t in range(cfg.T + 1):
            mean_est = float(est[:, t].mean())
            rows.append({
                'sigma': float(sigma),
                't': t,
                'opt_error': float(opt[:, t].mean()),
                'est_error': mean_est,
                'normalized_error': mean_est / sigma ** 2 if sigma > 0 else math.nan,
                'exact_fraction': float(np.mean(est[:, t] < EXACT_TOL)),
            })

    columns = ['sigma', 't', 'opt_error', 'est_error', 'normalized_error', 'exact_fraction']
    return ResultTable(rows, columns, config=cfg)


def _final_error_trial(cfg, truth, n, sigma, point, trial):
    stream = trial_stream(cfg, *point, trial)
    data = synthesize(truth, cfg.dist, n, sigma, stream.child('data'))
    init = perturbed_init(truth, cfg.extra('r', DEFAULT_RADIUS), stream.child('init'))
    trace = am_run(init, data.Xi, data.y, cfg.T)
    return dist(trace.final, truth).value


def stat_err_reference(sigma, k, d, n, pi_min):
    """sigma^2 k d / (pi_min^3 n) log(kd) log(n/kd), constants omitted"""
    kd = k * d
    if n <= kd:
        return math.nan
    return sigma ** 2 * kd / (pi_min ** 3 * n) * math.log(kd) * math.log(n / kd)


def run_rate(cfg, threads=1):
    """Final estimation error over a grid of (d, 5d/n) with a fitted line per d"""
    rows = []
    for d in cfg.d_grid or (cfg.d,):
        truth = ParamSet.standard_basis(cfg.k, d)
        group = []
        for ratio in cfg.extra('ratio_grid', ()):
            n = n_from_ratio(d, ratio)
            logger.info(f"[{cfg.name}] d={d}, 5d/n={ratio} (n={n}): {cfg.trials} trials")
            errors = np.array(run_trials(
                _final_error_trial,
                [(cfg, truth, n, cfg.sigma, ('d', d, 'n', n), t) for t in range(cfg.trials)],
                threads,
            ))
            group.append({
                'd': d,
                'ratio': float(ratio),
                'n': n,
                'mean_error': float(errors.mean()),
                'std_error': float(errors.std()),
                'stat_err_reference': stat_err_reference(cfg.sigma, cfg.k, d, n, 1.0 / cfg.k),
            })
        slope, intercept, _ = linear_fit([r['ratio'] for r in group], [r['mean_error'] for r in group])
        for row in group:
            row['fit_slope'] = slope
            row['fit_intercept'] = intercept
        rows.extend(group)

    columns = ['d', 'ratio', 'n', 'mean_error', 'std_error', 'stat_err_reference', 'fit_slope', 'fit_intercept']
    return ResultTable(rows, columns, config=cfg)


def _cone_trial(cfg, truth, inv_cubed, trial):
    stream = trial_stream(cfg, 'inv_pimin_cubed', inv_cubed, trial)
    data = synthesize(truth, cfg.dist, cfg.n, cfg.sigma, stream.child('data'))
    init = perturbed_init(truth, cfg.extra('r', DEFAULT_RADIUS), stream.child('init'))
    final = am_run(init, data.Xi, data.y, cfg.T).final
    match = dist(final, truth)
    rare = final.matrix[match.permutation[RARE_PIECE]] - truth.matrix[RARE_PIECE]
    return match.value, float(rare @ rare), float(rare[TRANSVERSE] ** 2)


def transverse_reference(sigma, n, alpha):
    """
    Least-squares variance of the rare piece's x2 slope on the true partition:
    sigma^2 / (n pi_min E[x2^2 | cone]). x2 is uncorrelated with x1 and 1 on the cone.
    """
    _, second = cone_moments(alpha)
    return sigma ** 2 / (n * (alpha / math.pi) * second)


def run_pimin(cfg, threads=1):
    """
    Final estimation error on the three-piece cone construction, whose
    smallest piece has probability alpha/pi, against 1/pi_min^3.

    Besides the total error the table carries the rare piece's error and the
    part of it along x2, where the cone squeezes the design. The line is
    fitted to that transverse error.
    """
    rows = []
    for inv_cubed in cfg.extra('inv_pimin_cubed', ()):
        alpha = math.pi / inv_cubed ** (1.0 / 3.0)
        truth = ParamSet.cone(alpha)
        logger.info(f"[{cfg.name}] 1/pi_min^3={inv_cubed} (alpha={alpha:.4f}): {cfg.trials} trials")
        results = np.array(run_trials(
            _cone_trial,
            [(cfg, truth, inv_cubed, t) for t in range(cfg.trials)],
            threads,
        ))
        rows.append({
            'inv_pimin_cubed': float(inv_cubed),
            'alpha': alpha,
            'pi_min': alpha / math.pi,
            'mean_error': float(results[:, 0].mean()),
            'std_error': float(results[:, 0].std()),
            'rare_piece_error': float(results[:, 1].mean()),
            'transverse_error': float(results[:, 2].mean()),
            'transverse_reference': transverse_reference(cfg.sigma, cfg.n, alpha),
        })

    slope, intercept, r2 = linear_fit([r['inv_pimin_cubed'] for r in rows], [r['transverse_error'] for r in rows])
    for row in rows:
        row.update(fit_slope=slope, fit_intercept=intercept, fit_r2=r2)

    columns = [
        'inv_pimin_cubed', 'alpha', 'pi_min', 'mean_error', 'std_error', 'rare_piece_error',
        'transverse_error', 'transverse_reference', 'fit_slope', 'fit_intercept', 'fit_r2',
    ]
    return ResultTable(rows, columns, config=cfg)
