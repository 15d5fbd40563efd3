import logging

import numpy as np
from flask import Blueprint, current_app, jsonify, request

from ..estimator import MaxAffineRegressor
from ..exceptions import InvalidInputError
from ..experiments import EXPERIMENTS
from ..model import ParamSet, append_ones, predict

logger = logging.getLogger(__name__)

api_bp = Blueprint('api', __name__, url_prefix='/api')


def _json_body():
    body = request.get_json(silent=True)
    if not isinstance(body, dict):
        raise InvalidInputError("Request body must be a JSON object")
    return body


def _matrix(body, key):
    if key not in body:
        raise InvalidInputError(f"Missing field '{key}'")
    try:
        X = np.asarray(body[key], dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"Field '{key}' must be a numeric matrix ({e})") from e
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InvalidInputError(f"Field '{key}' must be a non-empty matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError(f"Field '{key}' contains non-finite values")
    limit = current_app.config['MAX_UPLOAD_ROWS']
    if X.shape[0] > limit:
        raise InvalidInputError(f"At most {limit} rows are accepted, got {X.shape[0]}")
    return X


def _integer(body, key, default=None, minimum=0):
    value = body.get(key, default)
    if value is None:
        raise InvalidInputError(f"Missing field '{key}'")
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise InvalidInputError(f"Field '{key}' must be an integer >= {minimum}, got {value!r}")
    return value


def _pieces(params):
    return [{'theta': p.theta.tolist(), 'intercept': p.intercept} for p in params.params]


@api_bp.route('/experiments', methods=['GET'])
def list_experiments():
    """Registered experiments with their descriptions"""
    return jsonify({
        'experiments': [
            {'name': name, 'description': experiment.description}
            for name, experiment in EXPERIMENTS.items()
        ]
    })


@api_bp.route('/fit', methods=['POST'])
def fit():
    """Fit a max-affine model to JSON X, y with k pieces"""
    body = _json_body()
    X = _matrix(body, 'X')
    try:
        y = np.asarray(body.get('y', []), dtype=float).reshape(-1)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"Field 'y' must be a numeric vector ({e})") from e
    if y.shape[0] != X.shape[0]:
        raise InvalidInputError(f"'y' has {y.shape[0]} entries, 'X' has {X.shape[0]} rows")

    model = MaxAffineRegressor(
        n_pieces=_integer(body, 'k', minimum=1),
        n_iter=_integer(body, 'T', 50),
        n_candidates=_integer(body, 'M', 70, minimum=1),
        random_state=_integer(body, 'seed', 0),
    )
    try:
        model.fit(X, y)
    except ValueError as e:
        raise InvalidInputError(str(e)) from e

    logger.info(f"Fitted k={model.n_pieces} on n={X.shape[0]}, d={X.shape[1]}")
    return jsonify({
        'pieces': _pieces(model.params_),
        'objective': model.objective_[-1],
        'n': X.shape[0],
        'd': X.shape[1],
    })


@api_bp.route('/predict', methods=['POST'])
def predict_values():
    """Evaluate JSON pieces [{theta, intercept}, ...] at the rows of X"""
    body = _json_body()
    pieces = body.get('pieces')
    if not isinstance(pieces, list) or not pieces:
        raise InvalidInputError("Field 'pieces' must be a non-empty list")
    try:
        betas = [list(piece['theta']) + [piece['intercept']] for piece in pieces]
    except (KeyError, TypeError) as e:
        raise InvalidInputError(f"Every piece needs 'theta' and 'intercept' ({e})") from e
    if len({len(beta) for beta in betas}) != 1:
        raise InvalidInputError("All pieces must share one dimension")
    try:
        params = ParamSet.from_matrix(betas)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"Pieces must hold numeric values ({e})") from e

    X = _matrix(body, 'X')
    if X.shape[1] != params.d:
        raise InvalidInputError(f"'X' has {X.shape[1]} columns, pieces have dimension {params.d}")
    return jsonify({'predictions': predict(params, append_ones(X)).tolist()})
