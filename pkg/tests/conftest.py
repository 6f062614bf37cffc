import random

import pytest

from monocube.funcs import ValuedFunction, random_function
from monocube.poset import PosetDomain, hypercube
from monocube.seeds import derive_seed


def suite_functions(count, dims, image_sizes, master_seed):
    """Deterministic random-function suite: (d, r) drawn uniformly per
    instance, values seeded from (master_seed, index)."""
    rng = random.Random(master_seed)
    out = []
    for idx in range(count):
        d = rng.choice(dims)
        r = rng.choice(image_sizes)
        out.append(random_function(hypercube(d), r, derive_seed(master_seed, idx)))
    return out


@pytest.fixture(scope="session")
def chain3():
    return PosetDomain("dag", n=3, edges=[(0, 1), (1, 2)])


@pytest.fixture(scope="session")
def diamond_dag():
    """Two crossing source-sink pairs sharing a midpoint, plus a detached
    chain: a,b -> m -> x,y and c -> z."""
    # a=0 b=1 c=2 m=3 x=4 y=5 z=6
    return PosetDomain("dag", n=7,
                       edges=[(0, 3), (1, 3), (3, 4), (3, 5), (2, 6)])


def decreasing_chain(n):
    dom = PosetDomain("dag", n=n, edges=[(i, i + 1) for i in range(n - 1)])
    return ValuedFunction(dom, tuple(range(n, 0, -1)))
