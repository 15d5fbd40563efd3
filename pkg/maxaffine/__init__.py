"""
maxaffine - estimation for max-affine regression
Alternating minimization, spectral initialization and a simulation harness.
"""

__version__ = '0.1.0'

from .model import AffineParam, ParamSet, Partition, GeometryReport  # noqa: E402
from .covariates import CovariateDist, Dataset  # noqa: E402
from .numerics import RngStream  # noqa: E402
from .estimator import MaxAffineRegressor  # noqa: E402

__all__ = [
    'AffineParam',
    'ParamSet',
    'Partition',
    'GeometryReport',
    'CovariateDist',
    'Dataset',
    'RngStream',
    'MaxAffineRegressor',
    '__version__',
]
