import numpy as np
import pytest

from core.graph import GraphSpec, Partition, make_branch
from datasources.graphfile import SAMPLES_DIR
from models.chain import ChainPartitionParams, chain_partition

SEEDS = range(100)


def random_partitioned_graph(seed, n_branches=None):
    """
    A random real graph with single-root branches.

    Center of 2-6 nodes, 0-3 branches (or `n_branches`) of 1-5 sites, couplings uniform in
    [-2, -0.1], onsite energies uniform in [-1, 1].
    """
    rng = np.random.default_rng(seed)

    def coupling():
        return rng.uniform(-2.0, -0.1)

    n_c = int(rng.integers(2, 7))
    n_br = int(rng.integers(0, 4)) if n_branches is None else n_branches
    sizes = [int(rng.integers(1, 6)) for _ in range(n_br)]

    hoppings = [(j, j + 1, coupling()) for j in range(n_c - 1)]
    for i in range(n_c):
        for j in range(i + 2, n_c):
            if rng.random() < 0.3:
                hoppings.append((i, j, coupling()))

    groups = []
    start = n_c
    for size in sizes:
        sites = list(range(start, start + size))
        hoppings += [(sites[m], sites[m + 1], coupling()) for m in range(size - 1)]
        for i in range(size):
            for j in range(i + 2, size):
                if rng.random() < 0.2:
                    hoppings.append((sites[i], sites[j], coupling()))
        root = int(rng.integers(0, n_c))
        attached = rng.choice(sites, size=int(rng.integers(1, min(2, size) + 1)), replace=False)
        hoppings += [(root, int(j), coupling()) for j in attached]
        groups.append((sites, root))
        start += size

    onsites = [(i, rng.uniform(-1.0, 1.0)) for i in range(start) if rng.random() < 0.5]
    spec = GraphSpec(n_nodes=start, hoppings=hoppings, onsites=onsites)
    branches = [make_branch(spec, sites, root) for sites, root in groups]
    return spec, Partition(center=range(n_c), branches=branches)


@pytest.fixture
def chain15():
    """The 15-site chain cut 5 / 4 / 6, with k = pi/4 as its fourth mode."""
    return chain_partition(ChainPartitionParams.from_mode(5, 4, 6, 4))


@pytest.fixture
def samples():
    return SAMPLES_DIR
