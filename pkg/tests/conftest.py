import random

import pytest
from hypothesis import HealthCheck, settings

from novikov.twisted import ZH, TwistedGroup

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def torus():
    """Cobordism and route-B data of the four-point torus map (computed once)."""
    from novikov.acceptance import torus_pipeline
    return torus_pipeline()


def random_zh(rng: random.Random, m: int, terms: int = 2, span: int = 2) -> ZH:
    d = {}
    for _ in range(rng.randint(0, terms)):
        d[tuple(rng.randint(-span, span) for _ in range(m))] = rng.choice([-3, -2, -1, 1, 2, 3])
    return ZH(m, d)


GROUPS = [TwistedGroup.trivial(), TwistedGroup.identity(1), TwistedGroup(1, ((-1,),)),
          TwistedGroup(2, ((0, 1), (1, 0))), TwistedGroup(2, ((2, 1), (1, 1)))]

# finite-order monodromies; a hyperbolic Phi makes the number of distinct
# monomials grow exponentially with depth, which rules out deep expansions
FINITE_GROUPS = GROUPS[:4]
