# Package initializer for the experiment harnesses

import logging
import math
from typing import Callable, NamedTuple

from ..covariates import CovariateDist
from ..exceptions import ConfigValidationError
from .conditioning import cone_conditioning
from .config import ExperimentConfig, load_config, validate_config
from .convergence import run_convergence, run_pimin, run_rate
from .phase_retrieval import phase_retrieval
from .pipeline import run_overall, run_pca_rate
from .sample_complexity import sample_complexity_search
from .table import ResultTable, read_result_csv

logger = logging.getLogger(__name__)


class Experiment(NamedTuple):
    runner: Callable
    defaults: ExperimentConfig
    description: str


# Desk-scale defaults; full-scale runs override them through a config file.
# convergence uses n = 5kd so that every piece owns more samples than unknowns.
EXPERIMENTS = {
    'convergence': Experiment(
        run_convergence,
        ExperimentConfig(
            name='convergence', k=5, d=100, n=2500, sigma_list=(0.0, 0.15, 0.25, 0.4, 0.5),
            T=20, trials=20, extras={'r': 0.3},
        ),
        "Optimization and normalized estimation error per AM iteration from a near-truth start",
    ),
    'rate': Experiment(
        run_rate,
        ExperimentConfig(
            name='rate', k=5, d_grid=(10, 30), sigma=0.25, T=50, trials=20,
            extras={'ratio_grid': (0.025, 0.05, 0.1, 0.25), 'r': 0.3},
        ),
        "Final estimation error against 5d/n",
    ),
    'pimin': Experiment(
        run_pimin,
        ExperimentConfig(
            name='pimin', k=3, d=2, n=1000, sigma=0.4, T=50, trials=50,
            extras={'inv_pimin_cubed': (36.0, 100.0, 200.0), 'r': 0.3},
        ),
        "Final estimation error against 1/pi_min^3 on the three-piece cone construction",
    ),
    'pca_rate': Experiment(
        run_pca_rate,
        ExperimentConfig(
            name='pca_rate', k=3, d_grid=(20,), sigma=0.1, trials=30,
            extras={'ratio_grid': (0.0031, 0.02)},
        ),
        "Spectral subspace error against 5d/n",
    ),
    'overall': Experiment(
        run_overall,
        ExperimentConfig(
            name='overall', k=3, d=50, n=5250, sigma=0.1, T=50, trials=10,
            extras={'M_grid': (30, 70)},
        ),
        "Spectral + random search + AM against AM with repeated random initialization",
    ),
    'sample_complexity': Experiment(
        sample_complexity_search,
        ExperimentConfig(
            name='sample_complexity', d_grid=(15, 30), T=50, trials=20,
            extras={
                'dist_list': (CovariateDist.GAUSSIAN, CovariateDist.CENTERED_BINOMIAL),
                'k_grid': (2, 5), 'threshold': 0.9, 'r': 0.3,
            },
        ),
        "Least noiseless sample size at which AM recovers every piece, per (distribution, k) cell",
    ),
    'cone_conditioning': Experiment(
        cone_conditioning,
        ExperimentConfig(
            name='cone_conditioning', extras={'alpha_list': (math.pi / 16, math.pi / 8), 'mc_samples': 200000},
        ),
        "Second-moment spectrum of a Gaussian truncated to a narrow cone",
    ),
    'phase_retrieval': Experiment(
        phase_retrieval,
        ExperimentConfig(
            name='phase_retrieval', d=50, n=500, T=15, trials=50,
            extras={
                'dist_list': (CovariateDist.GAUSSIAN, CovariateDist.UNIFORM_CUBE),
                'init_scale': 0.2, 'recovery_tol': 1e-8,
            },
        ),
        "Exact-recovery rate of phase-retrieval AM up to a global sign",
    ),
}


def get_experiment(name):
    if name not in EXPERIMENTS:
        raise ConfigValidationError(f"Unknown experiment '{name}'. Choose from: {', '.join(sorted(EXPERIMENTS))}")
    return EXPERIMENTS[name]


def run_experiment(name, cfg=None, threads=1):
    """Run a registered experiment with its default config or the one given"""
    experiment = get_experiment(name)
    cfg = validate_config(cfg or experiment.defaults)
    if cfg.name != name:
        raise ConfigValidationError(f"Config is for experiment '{cfg.name}', not '{name}'")
    logger.info(f"Running experiment '{name}' with seed {cfg.seed} on {threads} thread(s)")
    return experiment.runner(cfg, threads=threads)


__all__ = [
    'EXPERIMENTS',
    'Experiment',
    'ExperimentConfig',
    'ResultTable',
    'get_experiment',
    'load_config',
    'read_result_csv',
    'run_experiment',
]
