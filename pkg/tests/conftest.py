import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from hyperwalls.arrangement import Parameter, builtin, t_for_n  # noqa: E402


@pytest.fixture(scope="session")
def p24():
    return builtin("P24")


@pytest.fixture(scope="session")
def gamma22():
    return builtin("Gamma22")


@pytest.fixture(scope="session")
def family():
    """The 22-wall family with a formal parameter."""
    return builtin("Family22")


@pytest.fixture
def family_at():
    """Family22 at an exact t^2 given as an int, Fraction or literal string."""
    def build(t_squared):
        if isinstance(t_squared, str):
            return builtin("Family22", Parameter.exact(t_squared))
        return builtin("Family22", Parameter.exact(Fraction(t_squared)))
    return build


@pytest.fixture
def extended_at_n():
    """ExtendedGenerators at the exact t_n with nu(t_n) = n."""
    def build(n):
        return builtin("ExtendedGenerators", Parameter.exact(t_for_n(n)))
    return build


@pytest.fixture(scope="session")
def extended():
    return builtin("ExtendedGenerators")
