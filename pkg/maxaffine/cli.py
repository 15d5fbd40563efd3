"""
Command-line entry point: run experiments, fit data files, list experiments
and serve the HTTP API.
"""

import functools
import logging
import os
import sys

import click

from .am import am_run
from .config import Config, configure_logging
from .covariates import Dataset
from .experiments import EXPERIMENTS, get_experiment, load_config, run_experiment
from .experiments.table import ResultTable
from .initialization import full_init
from .numerics import RngStream
from .web import create_app

logger = logging.getLogger(__name__)


def report_errors(func):
    """Turn any exception into a one-line 'error: ...' on stderr and exit code 1"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except Exception as e:
            logger.debug("Command failed", exc_info=True)
            click.echo(f"error: {e}", err=True)
            sys.exit(1)
    return wrapper


def fitted_table(params, provenance):
    """One row per piece: piece, theta_1..theta_d, intercept"""
    columns = ['piece'] + [f"theta_{j + 1}" for j in range(params.d)] + ['intercept']
    rows = []
    for j, beta in enumerate(params.matrix):
        row = {'piece': j}
        row.update({f"theta_{i + 1}": float(value) for i, value in enumerate(beta[:-1])})
        row['intercept'] = float(beta[-1])
        rows.append(row)
    return ResultTable(rows, columns, provenance=provenance)


@click.group()
@click.option('--log-level', default=None, help='Logging level (defaults to MAXAFFINE_LOG_LEVEL or INFO)')
def main(log_level):
    """Max-affine regression by alternating minimization"""
    configure_logging(log_level or Config.LOG_LEVEL, Config.LOG_FILE)


@main.command('run')
@click.argument('name')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='key=value file overriding the default configuration')
@click.option('--out', 'out_dir', default=Config.OUTPUT_DIR, show_default=True, help='Output directory')
@click.option('--seed', type=int, default=None, help='Override the configured seed')
@click.option('--threads', type=int, default=Config.THREADS, show_default=True, help='Trials run concurrently')
@report_errors
def run_command(name, config_path, out_dir, seed, threads):
    """Run experiment NAME and write <out>/NAME.csv"""
    experiment = get_experiment(name)
    cfg = experiment.defaults
    if config_path:
        cfg = load_config(config_path, cfg)
    if seed is not None:
        cfg = cfg.with_overrides(seed=seed)
    table = run_experiment(name, cfg, threads=max(1, threads))
    path = table.to_csv(os.path.join(out_dir, f"{name}.csv"))
    click.echo(path)


@main.command('fit')
@click.option('--data', 'data_path', required=True, type=click.Path(dir_okay=False), help='CSV with columns x1..xd,y')
@click.option('--k', 'k', required=True, type=int, help='Number of affine pieces')
@click.option('--T', 'T', default=50, show_default=True, type=int, help='AM iterations')
@click.option('--M', 'M', default=70, show_default=True, type=int, help='Random-search candidates')
@click.option('--seed', default=0, show_default=True, type=int)
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False), help='Output CSV')
@report_errors
def fit_command(data_path, k, T, M, seed, out_path):
    """Fit a max-affine model to a data file"""
    data = Dataset.from_csv(data_path)
    start = full_init(data, k, M, RngStream(seed).child('init'))
    trace = am_run(start, data.Xi, data.y, T)
    provenance = [
        ('data', data_path), ('k', k), ('T', T), ('M', M), ('seed', seed),
        ('objective', repr(trace.objective[-1])),
    ]
    fitted_table(trace.final, provenance).to_csv(out_path)
    click.echo(out_path)


@main.command('list')
def list_command():
    """List the registered experiments"""
    for name, experiment in EXPERIMENTS.items():
        click.echo(f"{name}\t{experiment.description}")


@main.command('serve')
@click.option('--host', default='127.0.0.1', show_default=True)
@click.option('--port', default=5000, show_default=True, type=int)
@click.option('--env', 'config_name', default=None, help='Configuration name (development, production, testing)')
@report_errors
def serve_command(host, port, config_name):
    """Serve the HTTP API with Flask's development server"""
    app = create_app(config_name)
    app.run(host=host, port=port, debug=app.config['DEBUG'])


if __name__ == '__main__':
    main()
