"""Uniform periodic Cartesian grids and piecewise-constant cell fields.

Cell ``(i, j)`` sits in column ``i`` and row ``j``; its flat index is
``i + nx * j``.  Field data is stored as an array of shape ``(ncomp, ny, nx)``
so that a row-major flattening of one component reproduces that ordering.

Edges come in two families.  The vertical edge ``(i, j)`` separates cell
``(i, j)`` (in) from ``(i + 1, j)`` (out) and carries the normal ``+x``; the
horizontal edge ``(i, j)`` separates ``(i, j)`` from ``(i, j + 1)`` with
normal ``+y``.  Indices wrap around, so the mesh is a torus.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .errors import ConfigurationError, InputError, UsageError

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(3)


class Edge(NamedTuple):
    orientation: str  # "x" (vertical edge, normal +x) or "y" (horizontal, normal +y)
    i: int
    j: int


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def h(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def cell_measure(self) -> float:
        return self.h * self.h

    @property
    def edge_measure(self) -> float:
        return self.h

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def ncells(self) -> int:
        return self.nx * self.ny

    @property
    def nedges(self) -> int:
        return 2 * self.nx * self.ny

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def cell_index(self, i: int, j: int) -> int:
        return (i % self.nx) + self.nx * (j % self.ny)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, Y)`` arrays of shape ``(ny, nx)``."""
        h = self.h
        xc = self.x0 + (np.arange(self.nx) + 0.5) * h
        yc = self.y0 + (np.arange(self.ny) + 0.5) * h
        return np.meshgrid(xc, yc)

    def edges(self) -> Iterator[Edge]:
        for j in range(self.ny):
            for i in range(self.nx):
                yield Edge("x", i, j)
        for j in range(self.ny):
            for i in range(self.nx):
                yield Edge("y", i, j)

    def edge_cells(self, edge: Edge) -> tuple[int, int]:
        """Flat indices of the (in, out) cells of ``edge``."""
        if edge.orientation == "x":
            return self.cell_index(edge.i, edge.j), self.cell_index(edge.i + 1, edge.j)
        if edge.orientation == "y":
            return self.cell_index(edge.i, edge.j), self.cell_index(edge.i, edge.j + 1)
        raise UsageError(f"unknown edge orientation {edge.orientation!r}")

    def edge_normal(self, edge: Edge) -> tuple[float, float]:
        return (1.0, 0.0) if edge.orientation == "x" else (0.0, 1.0)

    def cell_edges(self, i: int, j: int) -> list[tuple[Edge, float]]:
        """The four edges of cell ``(i, j)`` with the sign of their normal seen from the cell."""
        nx, ny = self.nx, self.ny
        return [
            (Edge("x", i % nx, j % ny), +1.0),
            (Edge("x", (i - 1) % nx, j % ny), -1.0),
            (Edge("y", i % nx, j % ny), +1.0),
            (Edge("y", i % nx, (j - 1) % ny), -1.0),
        ]


def build_grid(nx: int, ny: int, domain) -> Grid:
    """Build a periodic grid of ``nx * ny`` square cells on ``domain = (x0, x1, y0, y1)``."""
    try:
        nx_i, ny_i = int(nx), int(ny)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"cell counts must be integers, got {nx!r}, {ny!r}") from exc
    if nx_i != nx or ny_i != ny:
        raise ConfigurationError(f"cell counts must be integers, got {nx!r}, {ny!r}")
    if nx_i < 1 or ny_i < 1:
        raise ConfigurationError(f"cell counts must be >= 1, got nx={nx}, ny={ny}")
    x0, x1, y0, y1 = (float(v) for v in domain)
    if not (x1 > x0 and y1 > y0):
        raise ConfigurationError(f"degenerate domain {domain!r}")
    hx = (x1 - x0) / nx_i
    hy = (y1 - y0) / ny_i
    if abs(hx - hy) > 1e-12 * max(hx, hy):
        raise ConfigurationError(f"cells must be square: hx={hx!r}, hy={hy!r}")
    return Grid(nx_i, ny_i, x0, x1, y0, y1)


@dataclass
class CellField:
    """Piecewise-constant vector field, ``data.shape == (ncomp, ny, nx)``."""

    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim == 2:
            self.data = self.data[None]
        if self.data.shape[1:] != self.grid.shape:
            raise UsageError(
                f"field shape {self.data.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.data)):
            bad = np.argwhere(~np.all(np.isfinite(self.data), axis=0))[0]
            raise InputError(f"non-finite field value in cell (i={bad[1]}, j={bad[0]})")

    @property
    def ncomp(self) -> int:
        return self.data.shape[0]

    def cell(self, i: int, j: int) -> np.ndarray:
        return self.data[:, j % self.grid.ny, i % self.grid.nx]

    def flat(self) -> np.ndarray:
        """Component-major flat view: ``flat()[c, i + nx*j]``."""
        return self.data.reshape(self.ncomp, -1)

    def copy(self) -> "CellField":
        return CellField(self.grid, self.data.copy())

    def integral(self) -> np.ndarray:
        """Per-component sum of |K| U_K."""
        return self.data.sum(axis=(1, 2)) * self.grid.cell_measure


def project(grid: Grid, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> CellField:
    """Cell averages of ``f`` using tensor-product 3x3 Gauss quadrature.

    ``f(x, y)`` must accept broadcastable arrays and return either an array
    shaped like ``x`` (scalar field) or ``(ncomp,) + x.shape``.
    """
    X, Y = grid.cell_centers()
    half = 0.5 * grid.h
    total = None
    for a, wa in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
        for b, wb in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
            val = np.asarray(f(X + a * half, Y + b * half), dtype=float)
            if val.ndim == 2:
                val = val[None]
            val = np.broadcast_to(val, val.shape[:1] + grid.shape)
            term = 0.25 * wa * wb * val
            total = term if total is None else total + term
    finite = np.all(np.isfinite(total), axis=0)
    if not finite.all():
        j, i = np.argwhere(~finite)[0]
        raise InputError(f"projected function is not finite in cell (i={i}, j={j})")
    return CellField(grid, total)


def edge_jump(field: CellField, edge: Edge) -> np.ndarray:
    k_in, k_out = field.grid.edge_cells(edge)
    flat = field.flat()
    return flat[:, k_out] - flat[:, k_in]


def edge_avg(field: CellField, edge: Edge) -> np.ndarray:
    k_in, k_out = field.grid.edge_cells(edge)
    flat = field.flat()
    return 0.5 * (flat[:, k_in] + flat[:, k_out])


def neighbor(a: np.ndarray, di: int, dj: int) -> np.ndarray:
    """Array whose entry ``[..., j, i]`` is ``a[..., j + dj, i + di]`` (periodic)."""
    if di:
        a = np.roll(a, -di, axis=-1)
    if dj:
        a = np.roll(a, -dj, axis=-2)
    return a


def jumps(data: np.ndarray, orientation: str) -> np.ndarray:
    """Jumps out - in across every edge of one family, indexed like the edges."""
    if orientation == "x":
        return neighbor(data, 1, 0) - data
    if orientation == "y":
        return neighbor(data, 0, 1) - data
    raise UsageError(f"unknown edge orientation {orientation!r}")
