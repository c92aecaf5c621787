import numpy as np
import pytest

from kgnf.spectral import Field, State, make_grid, to_spectral, zero_field


@pytest.fixture
def grid64():
    return make_grid(64, 2 * np.pi)


@pytest.fixture
def grid128():
    return make_grid(128, 2 * np.pi)


def band_limited(grid, rng, kmax=None):
    """Random real field supported in |k| < kmax (default n/4)."""
    kmax = kmax or grid.n // 4
    c = np.zeros(grid.n, dtype=complex)
    c[0] = rng.normal()
    for k in range(1, kmax):
        z = rng.normal() + 1j * rng.normal()
        c[k] = z
        c[-k] = np.conj(z)
    return Field(grid, c)


def cos_state(grid, amp=1.0, k=1, vel_amp=0.0):
    u = amp * np.cos(k * (2 * np.pi / grid.length) * grid.x)
    st = to_spectral(u, grid)
    if vel_amp:
        ut = vel_amp * np.cos(k * (2 * np.pi / grid.length) * grid.x)
        return State(st, to_spectral(ut, grid))
    return State(st, zero_field(grid))
