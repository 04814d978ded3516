"""
Shared fixtures: the vehicle taxonomy, chains, stars and complete trees
"""
import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from humangs.services.graph_core import Direction, build_dag
from humangs.services.harness import gen_balanced

hypothesis_settings.register_profile(
    "humangs", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.load_profile("humangs")


@pytest.fixture
def taxonomy():
    """vehicle -> car -> {nissan -> {maxima, sentra}, mercedes}"""
    return build_dag(
        ["vehicle", "car", "nissan", "maxima", "sentra", "mercedes"],
        [("vehicle", "car"), ("car", "nissan"), ("car", "mercedes"),
         ("nissan", "maxima"), ("nissan", "sentra")],
    )


@pytest.fixture
def chain():
    return build_dag(["a", "b", "c"], [("a", "b"), ("b", "c")])


@pytest.fixture
def up_chain():
    return build_dag(["a", "b", "c"], [("c", "b"), ("b", "a")])


@pytest.fixture
def star():
    return build_dag(["a", "b", "c"], [("a", "b"), ("a", "c")])


@pytest.fixture
def up_star():
    return build_dag(["a", "b", "c"], [("b", "a"), ("c", "a")])


@pytest.fixture
def diamond():
    return build_dag(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


@pytest.fixture
def binary_down():
    return gen_balanced(2, 2, Direction.DOWN)


@pytest.fixture
def binary_up():
    return gen_balanced(2, 2, Direction.UP)
