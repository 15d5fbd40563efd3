"""
Noiseless sample complexity: the least n at which AM from a perturbed start
recovers every piece in at least a threshold fraction of trials.
"""

import logging
import math

import numpy as np

from ..am import am_run_until
from ..covariates import CovariateDist, synthesize
from ..exceptions import BudgetExceededError
from ..metrics import is_recovered
from ..model import ParamSet
from .common import DEFAULT_RADIUS, linear_fit, perturbed_init, run_trials, trial_stream
from .config import paired_cells
from .table import ResultTable

logger = logging.getLogger(__name__)

# Guard on the final downward verification walk
MAX_VERIFY_STEPS = 50


def _recovery_trial(cfg, dist, k, d, n, trial):
    stream = trial_stream(cfg, dist.value, 'k', k, 'd', d, 'n', n, trial)
    truth = ParamSet.standard_basis(k, d)
    data = synthesize(truth, dist, n, 0.0, stream.child('data'))
    init = perturbed_init(truth, cfg.extra('r', DEFAULT_RADIUS), stream.child('init'))
    trace = am_run_until(init, data.Xi, data.y, cfg.T, cfg.extra('conv_tol', 1e-12))
    return is_recovered(trace.final, truth, cfg.extra('recovery_tol', 0.01))


class SuccessCurve:
    """Memoized empirical success probability as a function of n for one cell"""

    def __init__(self, cfg, dist, k, d, threads):
        self.cfg = cfg
        self.dist = dist
        self.k = k
        self.d = d
        self.threads = threads
        self.cache = {}

    def __call__(self, n):
        if n not in self.cache:
            outcomes = run_trials(
                _recovery_trial,
                [(self.cfg, self.dist, self.k, self.d, n, t) for t in range(self.cfg.trials)],
                self.threads,
            )
            self.cache[n] = float(np.mean(outcomes))
            logger.debug(f"[{self.cfg.name}] {self.dist.value} k={self.k} d={self.d} n={n}: success {self.cache[n]:.2f}")
        return self.cache[n]

    def succeeds(self, n, threshold):
        return self(n) >= threshold


def minimal_sample_size(curve, threshold, n_start, n_step, n_max, n_min=1):
    """
    Least n with success probability >= threshold: doubling (or halving) to
    bracket the transition, bisection down to n_step, then a downward walk that
    re-checks n - n_step.

    Raises:
        BudgetExceededError: when no n <= n_max succeeds
    """
    n = max(n_start, n_min)
    if curve.succeeds(n, threshold):
        hi = n
        lo = None
        while hi > n_min:
            candidate = max(n_min, hi // 2)
            if not curve.succeeds(candidate, threshold):
                lo = candidate
                break
            hi = candidate
        if lo is None:
            return hi
    else:
        lo = n
        hi = None
        while hi is None:
            candidate = lo * 2
            if candidate > n_max:
                if lo < n_max and curve.succeeds(n_max, threshold):
                    hi = n_max
                    break
                raise BudgetExceededError(f"No sample size up to {n_max} reaches success probability {threshold}")
            if curve.succeeds(candidate, threshold):
                hi = candidate
            else:
                lo = candidate

    # lo fails and hi succeeds
    while hi - lo > n_step:
        mid = (lo + hi) // 2
        if curve.succeeds(mid, threshold):
            hi = mid
        else:
            lo = mid

    for _ in range(MAX_VERIFY_STEPS):
        below = hi - n_step
        if below <= lo or below < n_min or not curve.succeeds(below, threshold):
            break
        hi = below
    return hi


def sample_complexity_search(cfg, threads=1):
    """
    Minimal n per (distribution, k, d) with n/k and a log-log slope of n
    against d per (distribution, k) cell. dist_list and k_grid pair up entry
    by entry.
    """
    threshold = cfg.extra('threshold', 0.9)
    rows = []
    for dist, k in paired_cells(cfg):
        if dist is CovariateDist.RADEMACHER:
            logger.warning(
                f"[{cfg.name}] rademacher k={k}: x_j is constant on the subset of piece j, so the "
                "standard-basis truth is only determined up to a slope-intercept trade-off and may never be recovered"
            )
        group = []
        for d in cfg.d_grid or (cfg.d,):
            curve = SuccessCurve(cfg, dist, k, d, threads)
            n_start = cfg.extra('n_start') or 2 * k * (d + 1)
            n_step = cfg.extra('n_step') or k
            n_max = cfg.extra('n_max', 200000)
            logger.info(f"[{cfg.name}] {dist.value} k={k} d={d}: searching from n={n_start}")
            try:
                n_star = minimal_sample_size(curve, threshold, n_start, n_step, n_max, n_min=k)
                exceeded = 0
            except BudgetExceededError as e:
                logger.warning(f"[{cfg.name}] {dist.value} k={k} d={d}: {e}")
                n_star, exceeded = math.nan, 1
            group.append({
                'dist': dist.value,
                'k': k,
                'd': d,
                'n_star': n_star,
                'n_over_k': n_star / k,
                'success_at_n_star': curve(n_star) if not exceeded else math.nan,
                'evaluations': len(curve.cache),
                'budget_exceeded': exceeded,
            })

        found = [row for row in group if not row['budget_exceeded']]
        slope, _, _ = linear_fit(
            [math.log(row['d']) for row in found],
            [math.log(row['n_star']) for row in found],
        )
        for row in group:
            row['loglog_slope'] = slope
        rows.extend(group)

    columns = ['dist', 'k', 'd', 'n_star', 'n_over_k', 'success_at_n_star', 'evaluations', 'budget_exceeded', 'loglog_slope']
    return ResultTable(rows, columns, config=cfg)
