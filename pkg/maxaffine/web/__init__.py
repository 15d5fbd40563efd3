"""
Flask application factory for the HTTP API.
"""

import logging

from flask import Flask, jsonify

from ..config import configure_logging, get_config
from ..exceptions import MaxAffineError
from .api import api_bp

logger = logging.getLogger(__name__)

# List of all blueprints for easy registration
blueprints = [
    api_bp,
]


def create_app(config_name=None):
    """Build the API application for the named configuration"""
    app = Flask(__name__)
    app.config.from_object(get_config(config_name))
    configure_logging(app.config['LOG_LEVEL'], app.config['LOG_FILE'])

    for bp in blueprints:
        app.register_blueprint(bp)
        logger.debug(f"Registered blueprint {bp.name} at {bp.url_prefix}")

    @app.errorhandler(MaxAffineError)
    def library_error(error):
        logger.warning(f"Rejected request: {error}")
        return jsonify({'error': str(error)}), 400

    @app.errorhandler(404)
    def not_found_error(error):
        return jsonify({'error': 'Not found'}), 404

    @app.errorhandler(405)
    def method_not_allowed(error):
        return jsonify({'error': 'Method not allowed'}), 405

    @app.errorhandler(500)
    def internal_error(error):
        logger.error(f"Internal server error: {error}")
        return jsonify({'error': 'Internal server error'}), 500

    logger.info(f"maxaffine API ready (debug={app.config['DEBUG']}, testing={app.config['TESTING']})")
    return app
