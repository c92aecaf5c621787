"""Deterministic initial-data families.

The generator is numpy's PCG64 seeded with a 64-bit integer, so identical
(seed, grid, kind) reproduce bit-identical data across runs.
"""

import numpy as np

from .spectral import Grid, State, sobolev_norm, state_scale, to_spectral, zero_field

PROFILE_KINDS = ("mode1", "mode2", "twoscale", "random", "bump")


def make_profile(grid: Grid, kind: str, seed: int = 0, k1: int = 1, k2: int = 3,
                 width: float | None = None) -> State:
    """Unit-scale Cauchy data of the named family.

    mode1: single cosine at mode k1, zero velocity.
    mode2: cosines at modes k1 and k2 (two-scale pairs probe the one-sided
           frequency interactions).
    random: smooth random-phase data with a Gaussian spectral envelope.
    bump: modulated Gaussian bumps supported in the central quarter of the
          period (line-proxy fixtures).
    """
    x = grid.x
    base = 2.0 * np.pi / grid.length
    if kind == "mode1":
        u = np.cos(k1 * base * x)
        return State(to_spectral(u, grid), zero_field(grid))
    if kind == "mode2":
        u = np.cos(k1 * base * x) + 0.5 * np.cos(k2 * base * x + 0.7)
        return State(to_spectral(u, grid), zero_field(grid))
    if kind == "twoscale":
        # low mode dominates pointwise; a high pair at k2 and k2+k1 carries
        # comparable H^3 mass and closes low-high frequency triples
        hi = (1.0 + (k2 * base) ** 2) ** -1.5
        u = (np.cos(k1 * base * x)
             + hi * (np.cos(k2 * base * x + 0.3) + np.cos((k2 + k1) * base * x)))
        ut = (0.5 * np.sin(k1 * base * x)
              + 0.5 * hi * k2 * base * (np.sin(k2 * base * x)
                                        + np.sin((k2 + k1) * base * x + 0.5)))
        return State(to_spectral(u, grid), to_spectral(ut, grid))
    if kind == "random":
        rng = np.random.default_rng(np.random.PCG64(seed))
        kmax = grid.n // 4
        modes = np.arange(1, kmax)
        amp = np.exp(-((modes / (grid.n / 16.0)) ** 2))
        phases = rng.uniform(0, 2 * np.pi, size=(2, modes.size))
        u = np.sum(amp * np.cos(modes[None, :] * base * x[:, None]
                                + phases[0][None, :]), axis=1)
        ut = np.sum(amp * np.cos(modes[None, :] * base * x[:, None]
                                 + phases[1][None, :]), axis=1)
        return State(to_spectral(u, grid), to_spectral(ut, grid))
    if kind == "bump":
        rng = np.random.default_rng(np.random.PCG64(seed))
        w = width if width is not None else grid.length / 40.0
        u = np.zeros_like(x)
        ut = np.zeros_like(x)
        centre = grid.length / 2.0
        quarter = grid.length / 8.0
        for _ in range(3):
            c = centre + rng.uniform(-quarter, quarter)
            q = rng.integers(1, 5) * base * 8
            a = rng.uniform(0.5, 1.0)
            envelope = np.exp(-(((x - c) / w) ** 2))
            u += a * envelope * np.cos(q * (x - c))
            ut += a * rng.uniform(-1, 1) * envelope * np.sin(q * (x - c))
        return State(to_spectral(u, grid), to_spectral(ut, grid))
    raise ValueError(f"unknown profile kind {kind!r}; choose from {PROFILE_KINDS}")


def scaled_profile(grid: Grid, kind: str, eps: float, s: float, seed: int = 0,
                   **kwargs) -> State:
    """Profile rescaled so its H^s x H^(s-1) size equals eps."""
    state = make_profile(grid, kind, seed=seed, **kwargs)
    size = sobolev_norm(state, s)
    return state_scale(state, eps / size)
