import numpy as np
import pytest

from tropica.model import TrafficConfig, allocate

# Frozen worked example used across the suite: n=4, m=3, density 0.25.
EXAMPLE_A = (0.3, 0.1, 0.2, 0.2, 0.1, 0.2, 0.4)


@pytest.fixture
def example_config():
    return TrafficConfig(4, 3, EXAMPLE_A)


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)


def transfer_jitter(config: TrafficConfig, rng: np.random.Generator, moves: int = 40) -> TrafficConfig:
    """Random valid arc redistribution preserving the total (hence the density).

    Moves mass between arcs subject to the box and junction constraints;
    junction headroom is computed conservatively so the result always
    validates.
    """
    n, m = config.n, config.m
    size = n + m
    a = np.array(config.a)
    jn, jm = n - 1, size - 1
    for _ in range(moves):
        i, j = rng.integers(0, size, size=2)
        if i == j:
            continue
        room = 1.0 - a[j]
        if j in (jn, jm):
            room = min(room, 1.0 - a[jn] - a[jm])
        delta = rng.uniform(0.0, min(a[i], max(room, 0.0)))
        a[i] -= delta
        a[j] += delta
    return TrafficConfig(n, m, tuple(float(v) for v in a), config.convention)


def random_config_at(n: int, m: int, d: float, rng: np.random.Generator) -> TrafficConfig:
    """A random valid configuration with density d (up to rounding)."""
    return transfer_jitter(allocate(n, m, d), rng)
