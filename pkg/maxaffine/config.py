import os
import logging
import secrets

from dotenv import load_dotenv

# Pick up a local .env before the config classes read the environment
load_dotenv()

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Config:
    """Base configuration class"""
    SECRET_KEY = os.environ.get('SECRET_KEY') or secrets.token_hex(32)

    # Logging Configuration
    LOG_LEVEL = os.environ.get('MAXAFFINE_LOG_LEVEL') or 'INFO'
    LOG_FILE = os.environ.get('MAXAFFINE_LOG_FILE')

    # Experiment Configuration
    THREADS = int(os.environ.get('MAXAFFINE_THREADS') or 1)
    OUTPUT_DIR = os.environ.get('MAXAFFINE_OUTPUT_DIR') or 'results'

    # Web API Configuration
    MAX_UPLOAD_ROWS = int(os.environ.get('MAXAFFINE_MAX_UPLOAD_ROWS') or 100000)

    # Debug Configuration
    DEBUG = False
    TESTING = False


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True
    TESTING = False
    LOG_LEVEL = os.environ.get('MAXAFFINE_LOG_LEVEL') or 'DEBUG'


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False
    TESTING = False


class TestingConfig(Config):
    """Testing configuration"""
    DEBUG = True
    TESTING = True
    LOG_LEVEL = 'WARNING'
    LOG_FILE = None
    MAX_UPLOAD_ROWS = 5000


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': ProductionConfig
}


def get_config(name=None):
    """Resolve a configuration class by name, falling back to MAXAFFINE_ENV"""
    name = name or os.environ.get('MAXAFFINE_ENV') or 'default'
    if name not in config:
        raise KeyError(f"Unknown configuration '{name}'. Choose from: {', '.join(sorted(config))}")
    return config[name]


def configure_logging(level=None, log_file=None):
    """
    Configure the root logger with a stream handler and an optional file handler

    Args:
        level (str|int): Logging level name or number
        log_file (str): Path of the log file, or None for console only
    """
    level = level or Config.LOG_LEVEL
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True
    )
    logging.getLogger(__name__).debug(f"Logging configured at level {logging.getLevelName(level)}")
