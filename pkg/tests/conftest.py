import random
from fractions import Fraction

import pytest
from hypothesis import settings

from nnt.linalg import Mat

settings.register_profile("exact", max_examples=40, deadline=None)
settings.load_profile("exact")


@pytest.fixture
def rng():
    return random.Random(20240611)


def M(*rows):
    """Shorthand matrix literal."""
    return Mat(rows)


def F(p, q=1):
    return Fraction(p, q)
