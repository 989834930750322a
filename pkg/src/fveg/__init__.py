"""Finite volume evolution Galerkin solvers for linear acoustics and gas dynamics on periodic grids."""

__version__ = "0.1.0"
