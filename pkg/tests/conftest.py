import pytest
from hypothesis import HealthCheck, settings

from arcops.graph_core import enumerate_graphs

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def corpus(family="all", max_edges=3, shapes=((0, 1), (0, 2), (1, 0))):
    out = []
    for g, n in shapes:
        out.extend(enumerate_graphs(g, n, max_edges, family))
    return out


ALL_SMALL = corpus("all", 3)
QF = corpus("quasi_filling", 4, ((0, 1), (0, 2), (1, 0), (1, 1)))
EXH = corpus("exhaustive", 3)


@pytest.fixture(scope="session")
def annulus1():
    return enumerate_graphs(0, 1, 1, "exhaustive")[0]


@pytest.fixture(scope="session")
def torus2():
    (g,) = enumerate_graphs(1, 0, 2, "quasi_filling")
    return g
