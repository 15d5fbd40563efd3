import numpy as np
import pytest
from click.testing import CliRunner

from maxaffine.numerics import RngStream
from maxaffine.web import create_app


@pytest.fixture
def stream():
    return RngStream(2024)


@pytest.fixture
def gen(stream):
    return stream.generator()


@pytest.fixture
def random_generator():
    """Plain numpy generator for building test inputs"""
    return np.random.default_rng(7)


@pytest.fixture
def app():
    return create_app('testing')


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def runner():
    return CliRunner()
