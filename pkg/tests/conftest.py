import os
import random

import pytest
from hypothesis import HealthCheck, settings

from thurston import formats

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def data_path(name):
    return os.path.normpath(os.path.join(DATA, name))


def load(name):
    with open(data_path(name)) as fh:
        return formats.parse_presentation(fh.read())


def random_word(rng, rank, length):
    return tuple(rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(length))


@pytest.fixture
def rng():
    return random.Random(20240601)
