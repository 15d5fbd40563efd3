"""
Experiment configuration: the ExperimentConfig value, the flat key=value file
format and its validation.
"""

import logging
import math
import re
from dataclasses import dataclass, field, fields, replace

from ..covariates import CovariateDist
from ..exceptions import ConfigValidationError

logger = logging.getLogger(__name__)


def _parse_int(text):
    return int(text)


def _parse_float(text):
    return float(text)


def _parse_angle(text):
    """Float, or a multiple of pi written as 'pi', 'pi/8' or '3*pi/16'"""
    text = text.strip().replace(' ', '')
    match = re.fullmatch(r'(?:([0-9.]+)\*)?pi(?:/([0-9.]+))?', text)
    if match:
        numerator = float(match.group(1)) if match.group(1) else 1.0
        denominator = float(match.group(2)) if match.group(2) else 1.0
        return numerator * math.pi / denominator
    return float(text)


def _parse_list(item_parser):
    def parse(text):
        items = [part.strip() for part in text.split(',') if part.strip()]
        if not items:
            raise ValueError("empty list")
        return tuple(item_parser(item) for item in items)
    return parse


def _parse_dist(text):
    return CovariateDist.from_name(text)


# Keys that live directly on ExperimentConfig
CORE_KEYS = {
    'name': str,
    'k': _parse_int,
    'd': _parse_int,
    'n': _parse_int,
    'n_grid': _parse_list(_parse_int),
    'd_grid': _parse_list(_parse_int),
    'sigma': _parse_float,
    'sigma_list': _parse_list(_parse_float),
    'T': _parse_int,
    'dist': _parse_dist,
    'trials': _parse_int,
    'seed': _parse_int,
}

# Keys collected in ExperimentConfig.extras
EXTRA_KEYS = {
    'M': _parse_int,
    'M_grid': _parse_list(_parse_int),
    'alpha_list': _parse_list(_parse_angle),
    'inv_pimin_cubed': _parse_list(_parse_float),
    'ratio_grid': _parse_list(_parse_float),
    'k_grid': _parse_list(_parse_int),
    'dist_list': _parse_list(_parse_dist),
    'r': _parse_float,
    'recovery_tol': _parse_float,
    'threshold': _parse_float,
    'conv_tol': _parse_float,
    'init_scale': _parse_float,
    'mc_samples': _parse_int,
    'n_start': _parse_int,
    'n_step': _parse_int,
    'n_max': _parse_int,
}

COUNT_KEYS = ('k', 'd', 'n', 'trials')

# A scalar key set on its own replaces the list that the harnesses read first
SCALAR_LISTS = {
    'dist': 'dist_list',
    'k': 'k_grid',
    'd': 'd_grid',
    'n': 'n_grid',
    'sigma': 'sigma_list',
    'M': 'M_grid',
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run needs"""
    name: str
    k: int = 1
    d: int = 1
    n: int = 1
    n_grid: tuple = ()
    d_grid: tuple = ()
    sigma: float = 0.0
    sigma_list: tuple = ()
    T: int = 1
    dist: CovariateDist = CovariateDist.GAUSSIAN
    trials: int = 1
    seed: int = 0
    extras: dict = field(default_factory=dict)

    def extra(self, key, default=None):
        return self.extras.get(key, default)

    def with_overrides(self, **values):
        """
        Return a copy with core or extra keys replaced. A scalar such as
        'dist' also clears its list ('dist_list') so the new value is used.
        """
        core = {key: value for key, value in values.items() if key in CORE_KEYS}
        extras = dict(self.extras)
        for key, value in values.items():
            if key in EXTRA_KEYS:
                extras[key] = value
            elif key not in CORE_KEYS:
                raise ConfigValidationError(f"Unknown configuration key '{key}'")

        for scalar, plural in SCALAR_LISTS.items():
            if scalar not in values:
                continue
            if plural in values:
                raise ConfigValidationError(f"Set either '{scalar}' or '{plural}', not both")
            if plural in CORE_KEYS:
                core[plural] = ()
            elif plural in extras:
                logger.debug(f"'{scalar}' replaces the default '{plural}'")
                del extras[plural]
        updated = replace(self, extras=extras, **core)
        validate_config(updated)
        return updated

    def echo(self):
        """Ordered (key, text) pairs for the provenance block"""
        items = []
        for f in fields(self):
            if f.name == 'extras':
                continue
            items.append((f.name, _format_value(getattr(self, f.name))))
        for key in sorted(self.extras):
            items.append((key, _format_value(self.extras[key])))
        return items


def _format_value(value):
    if isinstance(value, CovariateDist):
        return value.value
    if isinstance(value, tuple):
        return ','.join(_format_value(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def validate_config(cfg):
    """
    Validate an experiment configuration

    Raises:
        ConfigValidationError: on any count below 1, negative noise level or malformed grid
    """
    for key in COUNT_KEYS:
        if getattr(cfg, key) < 1:
            raise ConfigValidationError(f"'{key}' must be at least 1, got {getattr(cfg, key)}")
    if cfg.T < 0:
        raise ConfigValidationError(f"'T' must be non-negative, got {cfg.T}")
    if cfg.sigma < 0 or any(s < 0 for s in cfg.sigma_list):
        raise ConfigValidationError("Noise levels must be non-negative")
    for key in ('n_grid', 'd_grid'):
        if any(v < 1 for v in getattr(cfg, key)):
            raise ConfigValidationError(f"'{key}' entries must be at least 1")
    for key in ('M', 'mc_samples', 'n_start', 'n_max'):
        if key in cfg.extras and cfg.extras[key] < 1:
            raise ConfigValidationError(f"'{key}' must be at least 1, got {cfg.extras[key]}")
    for key in ('M_grid', 'k_grid'):
        if any(v < 1 for v in cfg.extras.get(key, ())):
            raise ConfigValidationError(f"'{key}' entries must be at least 1")
    if any(v <= 0 for v in cfg.extras.get('ratio_grid', ())):
        raise ConfigValidationError("'ratio_grid' entries must be positive")
    if 'threshold' in cfg.extras and not 0.0 < cfg.extras['threshold'] <= 1.0:
        raise ConfigValidationError(f"'threshold' must lie in (0, 1], got {cfg.extras['threshold']}")
    for key in ('r', 'conv_tol', 'init_scale', 'n_step'):
        if key in cfg.extras and cfg.extras[key] < 0:
            raise ConfigValidationError(f"'{key}' must be non-negative, got {cfg.extras[key]}")
    if 'recovery_tol' in cfg.extras and cfg.extras['recovery_tol'] <= 0:
        raise ConfigValidationError("'recovery_tol' must be positive")
    paired_cells(cfg)
    return cfg


def paired_cells(cfg):
    """
    (distribution, k) cells: dist_list and k_grid zipped entry by entry, with
    a single distribution or a single k repeated across the other list.
    """
    dists = tuple(cfg.extras.get('dist_list', (cfg.dist,)))
    ks = tuple(cfg.extras.get('k_grid', (cfg.k,)))
    if len(dists) == 1:
        dists = dists * len(ks)
    elif len(ks) == 1:
        ks = ks * len(dists)
    elif len(dists) != len(ks):
        raise ConfigValidationError(
            f"'k_grid' pairs with 'dist_list' entry by entry, got {len(ks)} values of k for {len(dists)} distributions"
        )
    return list(zip(dists, ks))


def parse_config_text(text, source='<config>'):
    """
    Parse flat key=value lines ('#' starts a comment).

    Returns:
        dict: key -> parsed value
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigValidationError(f"{source}:{lineno}: expected key=value, got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split('=', 1))
        parser = CORE_KEYS.get(key) or EXTRA_KEYS.get(key)
        if parser is None:
            raise ConfigValidationError(f"{source}:{lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigValidationError(f"{source}:{lineno}: duplicate key '{key}'")
        try:
            values[key] = parser(value)
        except Exception as e:
            raise ConfigValidationError(f"{source}:{lineno}: bad value for '{key}': {e}") from e
    return values


def load_config(path, defaults):
    """Read a config file and overlay it on an experiment's default configuration"""
    with open(path, encoding='utf-8') as f:
        values = parse_config_text(f.read(), source=str(path))
    name = values.pop('name', defaults.name)
    if name != defaults.name:
        raise ConfigValidationError(f"{path}: config is for experiment '{name}', not '{defaults.name}'")
    logger.info(f"Loaded {len(values)} configuration values from {path}")
    return defaults.with_overrides(**values)
