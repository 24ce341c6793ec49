import numpy as np
import pytest

from qstchain import ChainConfig, decompose, to_single_excitation

BATTERY_SIZE = 50


def battery_entry(k: int):
    """k-th chain of the seeded conservation battery.

    Returns (config, gauge_shift, source).  Every draw comes from its own
    generator so entries stay stable if the battery grows.  The trap is
    randomized through its depth (edge field, in hopping units) rather
    than the bare prefactor: depth is what sets the energy scale, and
    drawing the prefactor uniformly would let steep long chains reach
    fields ~10^4 J, where eigenvalue round-off alone becomes visible in
    population comparisons over 30 time units.
    """
    rng = np.random.default_rng(1000 + k)
    n = int(rng.integers(2, 21))
    p = float(rng.uniform(0.0, 4.0))
    depth = float(rng.uniform(0.0, 60.0))
    edge_dist = (n - 1) / 2.0
    cfg = ChainConfig(
        n_sites=n,
        a=depth / edge_dist**p,
        p=p,
        j_edge=float(rng.uniform(0.05, 1.5)),
        j_bulk=float(rng.uniform(0.5, 1.5)),
    )
    shift = float(rng.uniform(-3.0, 3.0))
    source = int(rng.integers(1, n + 1))
    return cfg, shift, source


@pytest.fixture(scope="session")
def battery():
    return [battery_entry(k) for k in range(BATTERY_SIZE)]


@pytest.fixture(scope="session")
def flat8():
    return decompose(to_single_excitation(ChainConfig(n_sites=8).to_chain()))


@pytest.fixture(scope="session")
def trap8():
    # 8 sites, quadratic on-site profile, uniform couplings
    cfg = ChainConfig(n_sites=8, a=0.5, p=2.0, j_edge=1.0, j_bulk=1.0)
    return decompose(to_single_excitation(cfg.to_chain()))
