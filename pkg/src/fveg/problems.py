"""Benchmark problems: initial data, exact solutions and metadata.

Every problem is periodic.  Initial conditions are functions of ``(x, y)``
returning conserved variables with the component axis first, so they plug
straight into :func:`fveg.grid.project`.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import CapabilityError, ConfigurationError
from .evo_euler import GasParams, prim_to_cons
from .grid import CellField, Grid, build_grid, project

GAMMA = 1.4
PROBLEM_NAMES = ("wave-sine", "gresho", "traveling-vortex", "riemann-4shock", "riemann-spiral")

# traveling vortex parameters
VORTEX_RADIUS = 0.4
VORTEX_RHO_C = 0.5
VORTEX_U_C = 1.0
VORTEX_V_C = 1.0
VORTEX_P_C = 0.1
VORTEX_CENTER = (0.5, 0.5)

# four-quadrant states (rho, u, v, p) in the order x>.5 y>.5 | x<.5 y>.5 | x<.5 y<.5 | x>.5 y<.5
RIEMANN_STATES = {
    "riemann-4shock": (
        (0.5313, 0.0, 0.0, 0.4),
        (1.0, 0.7276, 0.0, 1.0),
        (0.8, 0.0, 0.0, 1.0),
        (1.0, 0.0, 0.7276, 1.0),
    ),
    "riemann-spiral": (
        (0.5, 0.5, -0.5, 5.0),
        (1.0, 0.5, 0.5, 5.0),
        (2.0, -0.5, 0.5, 5.0),
        (1.5, -0.5, -0.5, 5.0),
    ),
}


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    system: str  # "wave" or "euler"
    domain: tuple[float, float, float, float]
    t_final: float
    cfl: float
    initial: Callable[[np.ndarray, np.ndarray], np.ndarray]
    exact: Optional[Callable[[np.ndarray, np.ndarray, float], np.ndarray]] = None
    gamma: Optional[float] = None
    wave_speed: Optional[float] = None
    exact_times: Optional[str] = None  # "any" or "integer"
    projector: Optional[Callable[[Grid], CellField]] = field(default=None, compare=False)

    def grid(self, nx: int) -> Grid:
        x0, x1, y0, y1 = self.domain
        ny = int(round(nx * (y1 - y0) / (x1 - x0)))
        return build_grid(nx, ny, self.domain)

    def initial_field(self, grid: Grid) -> CellField:
        if self.projector is not None:
            return self.projector(grid)
        return project(grid, self.initial)

    def has_exact(self, t: float) -> bool:
        if self.exact is None:
            return False
        return self.exact_times == "any" or float(t).is_integer()


# ---------------------------------------------------------------------------
# wave-sine


def _wave_exact(c: float):
    def exact(x, y, t):
        k = 2.0 * np.pi
        sx, sy = np.sin(k * x), np.sin(k * y)
        s = np.sin(k * c * t) / c
        return np.stack(
            [-np.cos(k * c * t) / c * (sx + sy), s * np.cos(k * x), s * np.cos(k * y)]
        )

    return exact


# ---------------------------------------------------------------------------
# Gresho vortex


def gresho_primitive(x, y):
    r = np.hypot(x, y)
    inner = r <= 0.2
    mid = (r > 0.2) & (r < 0.4)
    ut = np.where(inner, 5.0 * r, np.where(mid, 2.0 - 5.0 * r, 0.0))
    with np.errstate(divide="ignore"):
        logr = np.log(np.where(r > 0, r, 1.0))
    p = np.where(
        inner,
        5.0 + 12.5 * r**2,
        np.where(mid, 9.0 - 4.0 * np.log(0.2) + 12.5 * r**2 - 20.0 * r + 4.0 * logr, 3.0 + 4.0 * np.log(2.0)),
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        sin_t = np.where(r > 0, y / r, 0.0)
        cos_t = np.where(r > 0, x / r, 0.0)
    return np.stack([np.ones_like(r), -ut * sin_t, ut * cos_t, p])


# ---------------------------------------------------------------------------
# traveling vortex


_VORTEX_GL = np.polynomial.legendre.leggauss(18)  # exact for the degree-35 integrand below


def _vortex_balance_integrand(r):
    """``rho(r) u_theta(r)^2 / r`` inside the vortex, in product form (no cancellation)."""
    rho = VORTEX_RHO_C + 0.5 * (1.0 - r * r) ** 6
    return rho * 1024.0**2 * (1.0 - r) ** 12 * r**11


def vortex_pressure(r):
    """Vortex pressure as a function of the scaled radius.

    Follows from the radial balance ``dp/dr = rho u_theta^2 / r`` and the
    ambient pressure at ``r = 1``: ``p(r) = p_c - int_r^1 rho u_theta^2 / s ds``.
    The integrand is a polynomial of degree 35, integrated exactly by
    18-point Gauss-Legendre quadrature.
    """
    r = np.asarray(r, dtype=float)
    lo = np.clip(r, 0.0, 1.0)
    x, w = _VORTEX_GL
    half = 0.5 * (1.0 - lo)
    s = lo[..., None] + half[..., None] * (x + 1.0)
    integral = half * np.sum(w * _vortex_balance_integrand(s), axis=-1)
    return VORTEX_P_C - integral


def vortex_primitive(x, y):
    dx = x - VORTEX_CENTER[0]
    dy = y - VORTEX_CENTER[1]
    s = np.hypot(dx, dy)
    r = s / VORTEX_RADIUS
    inside = r < 1.0
    with np.errstate(invalid="ignore", divide="ignore"):
        sin_t = np.where(s > 0, dy / s, 0.0)
        cos_t = np.where(s > 0, dx / s, 0.0)
    swirl = np.where(inside, 1024.0 * (1.0 - r) ** 6 * r**6, 0.0)
    rho = np.where(inside, VORTEX_RHO_C + 0.5 * (1.0 - r**2) ** 6, VORTEX_RHO_C)
    return np.stack([rho, VORTEX_U_C - swirl * sin_t, VORTEX_V_C + swirl * cos_t, vortex_pressure(r)])


# ---------------------------------------------------------------------------
# Riemann problems


def _riemann_primitive(states):
    def f(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        right, up = x > 0.5, y > 0.5
        quad = np.where(up, np.where(right, 0, 1), np.where(right, 3, 2))
        return np.stack([np.asarray(states)[quad, k] for k in range(4)])

    return f


def _riemann_projector(states, gas):
    """Cell averages of piecewise-constant quadrant data, exact by area fractions."""
    cons = [prim_to_cons(np.array(s), gas) for s in states]

    def projector(grid: Grid) -> CellField:
        h = grid.h
        xl = grid.x0 + np.arange(grid.nx) * h
        yl = grid.y0 + np.arange(grid.ny) * h
        fx_right = np.clip((xl + h - np.maximum(xl, 0.5)) / h, 0.0, 1.0)
        fy_up = np.clip((yl + h - np.maximum(yl, 0.5)) / h, 0.0, 1.0)
        FX, FY = np.meshgrid(fx_right, fy_up)
        weights = [FX * FY, (1 - FX) * FY, (1 - FX) * (1 - FY), FX * (1 - FY)]
        data = sum(w[None] * c[:, None, None] for w, c in zip(weights, cons))
        return CellField(grid, data)

    return projector


# ---------------------------------------------------------------------------


def _euler_initial(prim_fn, gas):
    return lambda x, y: prim_to_cons(prim_fn(x, y), gas)


def make_problem(name: str, **overrides) -> ProblemSpec:
    """Problem metadata for one of :data:`PROBLEM_NAMES`; keyword overrides replace defaults."""
    gas = GasParams(GAMMA)
    if name == "wave-sine":
        c = 1.0
        ex = _wave_exact(c)
        spec = ProblemSpec(
            name, "wave", (-1.0, 1.0, -1.0, 1.0), 0.1, 0.267,
            initial=lambda x, y: ex(x, y, 0.0), exact=ex, wave_speed=c, exact_times="any",
        )
    elif name == "gresho":
        spec = ProblemSpec(
            name, "euler", (-0.75, 0.75, -0.75, 0.75), 1.0, 0.45,
            initial=_euler_initial(gresho_primitive, gas), gamma=GAMMA,
        )
    elif name == "traveling-vortex":
        init = _euler_initial(vortex_primitive, gas)
        spec = ProblemSpec(
            name, "euler", (0.0, 1.0, 0.0, 1.0), 1.0, 0.45,
            initial=init, exact=lambda x, y, t: init(x, y), gamma=GAMMA, exact_times="integer",
        )
    elif name in RIEMANN_STATES:
        states = RIEMANN_STATES[name]
        spec = ProblemSpec(
            name, "euler", (0.0, 1.0, 0.0, 1.0), 0.15 if name == "riemann-4shock" else 0.2, 0.45,
            initial=_euler_initial(_riemann_primitive(states), gas), gamma=GAMMA,
            projector=_riemann_projector(states, gas),
        )
    else:
        raise ConfigurationError(f"unknown problem {name!r}; valid names: {', '.join(PROBLEM_NAMES)}")
    if overrides:
        spec = replace(spec, **overrides)
    return spec


def exact_solution(spec: ProblemSpec, grid: Grid, t: float) -> CellField:
    """Cell averages of the exact solution at time ``t``."""
    if not spec.has_exact(t):
        raise CapabilityError(
            f"problem {spec.name!r} has no exact solution at t={t}; use a reference solution instead"
        )
    return project(grid, lambda x, y: spec.exact(x, y, t))


def make_system(spec: ProblemSpec):
    from .systems import EulerSystem, WaveSystem
    from .evo_wave import WaveParams

    if spec.system == "wave":
        return WaveSystem(WaveParams(spec.wave_speed))
    return EulerSystem(GasParams(spec.gamma))
