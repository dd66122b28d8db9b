import numpy as np
import pytest

from lbmarl.env import LoadBalancingEnv
from lbmarl.netsim import NetworkSimulator, NetworkTopology, SimParams, linear_layout, place_ues


def make_topology(num_ue=15, num_bs=3, seed=0, edge_fraction=0.4):
    bs = linear_layout(num_bs, 720.0)
    ues = place_ues(num_ue, bs, 720.0, np.random.default_rng(seed), edge_fraction)
    return NetworkTopology(bs, ues)


def make_env(num_ue=15, seed=0, placement=0, **params):
    sim = NetworkSimulator(make_topology(num_ue, seed=placement), SimParams(**params), seed)
    return LoadBalancingEnv(sim)


@pytest.fixture
def small_env():
    return make_env(9, seed=3, placement=1)
