"""Desk-scale spectral laboratory for 1-D quasilinear Klein-Gordon flows."""

from .spectral import Field, Grid, State, make_grid, sobolev_norm, to_physical, to_spectral

__all__ = ["Field", "Grid", "State", "make_grid", "sobolev_norm",
           "to_physical", "to_spectral"]
