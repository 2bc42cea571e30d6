from dataclasses import replace

import numpy as np
import pytest

import aerialsim as a
from aerialsim.channel import AtgEnvironment, RadioParams
from aerialsim.mobility import MobilityParams, init_users
from aerialsim.radio import NetworkState


@pytest.fixture
def urban():
    return AtgEnvironment()


@pytest.fixture
def radio():
    return RadioParams()


@pytest.fixture
def desk_area():
    return a.square_area(2000.0)


@pytest.fixture
def desk_grid(desk_area):
    return a.PlacementGrid(desk_area, 5, 5, 3)


def make_snapshot(seed, area, n_users=50, n_rings=1, disabled=0):
    """Frozen t_st network snapshot: hex ground layout minus one site, PPP users.

    Returns (snapshot, learning_rng) with independent substreams so tests can
    pair user drops with learning randomness the same way the driver does.
    """
    ss = np.random.SeedSequence(seed).spawn(3)
    bss = a.hex_layout(n_rings, area)
    if disabled is not None:
        bss = [replace(b, active=False) if b.id == disabled else b for b in bss]
    users = init_users(a.drop_users_ppp(n_users, area, np.random.default_rng(ss[0])),
                       MobilityParams(), np.random.default_rng(ss[1]))
    snap = NetworkState(ground_bs=bss, users=users,
                        env=AtgEnvironment(), radio=RadioParams())
    return snap, np.random.default_rng(ss[2])
