import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hqm import Grid, QFunction

settings.register_profile(
    "deterministic",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def grid32():
    return Grid(32)


@pytest.fixture
def grid64():
    return Grid(64)


def random_qfunction(rng: np.random.Generator, grid: Grid, k_max: int = 4,
                     normalized: bool = False) -> QFunction:
    """Band-limited random quaternion function (frequencies <= k_max)."""
    x = grid.nodes
    values = np.zeros((grid.n_points, 4))
    for c in range(4):
        values[:, c] = rng.normal() * 0.5
        for k in range(1, k_max + 1):
            values[:, c] += rng.normal() * np.cos(k * x) + rng.normal() * np.sin(k * x)
    f = QFunction(grid, values)
    if normalized:
        from hqm import norm
        f = (1.0 / norm(f)) * f
    return f


def random_complex_qfunction(rng: np.random.Generator, grid: Grid, k_max: int = 4,
                             normalized: bool = False) -> QFunction:
    """Random band-limited function in the complex sector (z1 = 0 exactly)."""
    x = grid.nodes
    z0 = np.full(grid.n_points, rng.normal() + 1j * rng.normal(), dtype=complex)
    for k in range(1, k_max + 1):
        z0 += ((rng.normal() + 1j * rng.normal()) * np.exp(1j * k * x)
               + (rng.normal() + 1j * rng.normal()) * np.exp(-1j * k * x))
    f = QFunction.from_complex(grid, z0=z0)
    if normalized:
        from hqm import norm
        f = (1.0 / norm(f)) * f
    return f


def plane_wave(grid: Grid, k: int, amplitude: complex = 1.0) -> QFunction:
    """amplitude * e^{ikx} in the complex sector."""
    return QFunction.from_complex(grid, z0=amplitude * np.exp(1j * k * grid.nodes))


def normalized(f: QFunction) -> QFunction:
    from hqm import norm
    return (1.0 / norm(f)) * f


TWO_PI = 2.0 * math.pi
