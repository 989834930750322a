"""Edge fluxes, the conservative finite volume update and explicit time stepping.

Two numerical fluxes are available:

* the Simpson EG flux, ``(F(U_A) + 4 F(U_S) + F(U_B)) / 6`` of the physical
  flux at the predicted corner and midpoint states of an edge;
* an entropy-stable Roe-type flux ``<F> - 1/2 sum_j q_j alpha_j r_j`` whose
  viscosities ``q_j = |lambda_j| + [lambda_j]^+ / 4 + c_tilde alpha_j^2``
  dominate the entropy-conservative ones.

Fluxes on horizontal edges are obtained from the vertical-edge code applied to
the reflected, transposed field, so every formula is written once.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, NumericalError, StateValidityError, StepFailure
from .grid import CellField, Edge, neighbor

log = logging.getLogger(__name__)

FLUX_MODES = ("eg-simpson", "entropy-stable", "eg-with-fallback")
MAX_RETRIES = 5
CTILDE_SAFETY = 1.1


# ---------------------------------------------------------------------------
# entropy-stable flux


@dataclass
class WaveDecomposition:
    """Per-edge eigen-decomposition of a jump, with the modified viscosities."""

    lam: np.ndarray  # (N, ...) Roe eigenvalues
    R: np.ndarray  # (..., N, N) unit right eigenvectors in columns
    alpha: np.ndarray  # (N, ...) wave strengths
    lam_jump: np.ndarray  # (N, ...) lambda_j(U^{j+1}) - lambda_j(U^j)
    ctilde: np.ndarray  # (...)
    q: np.ndarray  # (N, ...) modified viscosities
    states: np.ndarray  # (N + 1, N, ...) intermediate states U^1 = U_L, ..., U^{N+1} = U_R


def _columns(R):
    """Columns of a ``(..., N, N)`` array as a list of ``(N, ...)`` arrays."""
    return [np.moveaxis(R[..., :, j], -1, 0) for j in range(R.shape[-1])]


def _eigvec_sensitivity(system, Um, delta):
    """Frobenius norm of the finite-difference derivative of the unit eigenvectors at ``Um``."""
    N = Um.shape[0]
    total = np.zeros(Um.shape[1:])
    for k in range(N):
        e = np.zeros((N,) + (1,) * (Um.ndim - 1))
        e[k] = 1.0
        _, Rp = system.eigensystem(Um + delta * e)
        _, Rm = system.eigensystem(Um - delta * e)
        d = (Rp - Rm) / (2.0 * delta[..., None, None])
        total += np.sum(d * d, axis=(-2, -1))
    return np.sqrt(total)


def decompose_jump(system, UL, UR) -> WaveDecomposition:
    """Decompose ``U_R - U_L`` into Roe waves and evaluate the modified viscosities."""
    UL, UR = np.asarray(UL, dtype=float), np.asarray(UR, dtype=float)
    N = UL.shape[0]
    lam, R = system.roe_eigensystem(UL, UR)
    jump = UR - UL
    alpha = np.moveaxis(np.linalg.solve(R, np.moveaxis(jump, 0, -1)[..., None])[..., 0], -1, 0)

    cols = _columns(R)
    states = [UL]
    for j in range(N):
        states.append(states[-1] + alpha[j] * cols[j])
    states[-1] = UR

    lam_jump = np.empty_like(lam)
    for j in range(N):
        a, b = states[j], states[j + 1]
        ok = system.admissible(a) & system.admissible(b)
        a = np.where(ok, a, UL)
        b = np.where(ok, b, UR)
        lam_jump[j] = system.eigenvalues(b)[j] - system.eigenvalues(a)[j]

    Um = 0.5 * (UL + UR)
    size = np.sqrt(np.sum(jump * jump, axis=0))
    delta = np.maximum(1e-4 * size, 1e-8 * np.sqrt(np.sum(Um * Um, axis=0)))
    c1 = _eigvec_sensitivity(system, Um, delta)
    c2 = np.maximum(np.max(np.abs(system.eigenvalues(UL)), axis=0), np.max(np.abs(system.eigenvalues(UR)), axis=0))
    ctilde = CTILDE_SAFETY * (c1**2 * c2 / 36.0 + c2 * c1**2 / 16.0)

    q = np.abs(lam) + 0.25 * np.maximum(lam_jump, 0.0) + ctilde * alpha**2
    return WaveDecomposition(lam, R, alpha, lam_jump, ctilde, q, np.stack(states))


def entropy_stable_flux(system, UL, UR) -> np.ndarray:
    """Entropy-stable x-flux between conserved states ``UL`` and ``UR`` (component axis first)."""
    UL, UR = np.asarray(UL, dtype=float), np.asarray(UR, dtype=float)
    for U in (UL, UR):
        ok = system.admissible(U)
        if not np.all(ok):
            raise StateValidityError("inadmissible state in entropy-stable flux")
    dec = decompose_jump(system, UL, UR)
    F = 0.5 * (system.flux_x(UL) + system.flux_x(UR))
    for j, r in enumerate(_columns(dec.R)):
        F = F - 0.5 * dec.q[j] * dec.alpha[j] * r
    return F


# ---------------------------------------------------------------------------
# EG flux


def _reflected(system, data):
    """Field seen in the frame where horizontal edges become vertical."""
    return system.reflect(data).transpose(0, 2, 1)


def _unreflect(system, F):
    return system.reflect(F.transpose(0, 2, 1))


def _x_fluxes(system, data, mode, supersonic):
    if mode == "entropy-stable":
        return entropy_stable_flux(system, data, neighbor(data, 1, 0)), 0
    F, bad = system.eg_flux_x(data, strict=(mode == "eg-simpson"), supersonic=supersonic)
    nbad = 0
    if bad is not None:
        jj, ii = np.nonzero(bad)
        nbad = len(ii)
        UL = data[:, jj, ii]
        UR = data[:, jj, (ii + 1) % data.shape[2]]
        F[:, jj, ii] = entropy_stable_flux(system, UL, UR)
    return F, nbad


@dataclass
class EdgeFluxes:
    """Fluxes on all edges: ``fx[:, j, i]`` on vertical edge ``(i, j)``, ``fy`` likewise."""

    fx: np.ndarray
    fy: np.ndarray
    fallback_edges: int = 0


def all_fluxes(system, data, mode: str = "eg-with-fallback", supersonic: str = "fallback") -> EdgeFluxes:
    """Numerical fluxes on every edge of a periodic field ``(N, ny, nx)``."""
    if mode not in FLUX_MODES:
        raise ConfigurationError(f"unknown flux mode {mode!r}; expected one of {FLUX_MODES}")
    fx, nx_bad = _x_fluxes(system, data, mode, supersonic)
    gy, ny_bad = _x_fluxes(system, _reflected(system, data), mode, supersonic)
    return EdgeFluxes(fx, _unreflect(system, gy), nx_bad + ny_bad)


def _edge_stencil(field: CellField, edge: Edge):
    """Six-cell stencil ``L, R, UL, UR, BL, BR`` of an edge, in the edge's own frame."""
    i, j = edge.i, edge.j
    if edge.orientation == "x":
        offs = [(0, 0), (1, 0), (0, 1), (1, 1), (0, -1), (1, -1)]
        return [field.cell(i + a, j + b) for a, b in offs]
    # horizontal edge: the frame's x-axis runs along +y, its y-axis along +x
    offs = [(0, 0), (0, 1), (1, 0), (1, 1), (-1, 0), (-1, 1)]
    return [field.cell(i + a, j + b) for a, b in offs]


def eg_flux(system, edge: Edge, field: CellField, strict: bool = True, supersonic: str = "fallback") -> np.ndarray:
    """Simpson EG flux ``F . n`` through one edge, evaluated from its own stencil."""
    cells = _edge_stencil(field, edge)
    if edge.orientation == "x":
        return system.eg_flux_stencil(*cells, strict=strict, supersonic=supersonic)
    cells = [system.reflect(c) for c in cells]
    return system.reflect(system.eg_flux_stencil(*cells, strict=strict, supersonic=supersonic))


# ---------------------------------------------------------------------------
# update and time stepping


def divergence(fluxes: EdgeFluxes, h: float) -> np.ndarray:
    """``(1/|K|) sum_sigma |sigma| F . n`` for every cell."""
    fx, fy = fluxes.fx, fluxes.fy
    return (fx - neighbor(fx, -1, 0) + fy - neighbor(fy, 0, -1)) / h


def fv_step(
    system,
    field: CellField,
    dt: float,
    mode: str = "eg-with-fallback",
    supersonic: str = "fallback",
    stats: Optional[dict] = None,
) -> CellField:
    """One forward-Euler finite volume step."""
    if not dt > 0:
        raise ConfigurationError(f"time step must be positive, got {dt!r}")
    fl = all_fluxes(system, field.data, mode, supersonic)
    new = field.data - dt * divergence(fl, field.grid.h)
    if stats is not None:
        stats["fallback_edges"] = stats.get("fallback_edges", 0) + fl.fallback_edges
    ok = system.admissible(new)
    if not np.all(ok):
        j, i = np.argwhere(~ok)[0]
        raise StepFailure(f"inadmissible state after update in cell (i={i}, j={j})")
    return CellField(field.grid, new)


def compute_dt(system, field: CellField, cfl: float) -> float:
    """CFL-limited step ``cfl * h / max(|u'| + c', |v'| + c')``."""
    if not 0 < cfl < 1:
        raise ConfigurationError(f"CFL number must lie in (0, 1), got {cfl!r}")
    smax = system.max_speeds(field.data)
    if not (np.isfinite(smax) and smax > 0):
        raise StateValidityError(f"invalid maximal wave speed {smax!r}")
    return cfl * field.grid.h / smax


@dataclass
class TimeState:
    t: float = 0.0
    dt: float = 0.0
    cfl: float = 0.45
    step_count: int = 0
    retries: int = 0
    fallback_edges: int = 0
    history: list = field(default_factory=list)


def integrate(
    system,
    field: CellField,
    t_final: float,
    cfl: float,
    mode: str = "eg-with-fallback",
    supersonic: str = "fallback",
    callback: Optional[Callable[[CellField, TimeState], None]] = None,
    max_steps: int = 10_000_000,
) -> tuple[CellField, TimeState]:
    """March ``field`` to ``t_final``, landing exactly on it.

    A step producing an inadmissible state is retried with half the step, at
    most five times.  ``callback(field, state)`` runs after every accepted step.
    """
    if not t_final >= 0:
        raise ConfigurationError(f"final time must be non-negative, got {t_final!r}")
    state = TimeState(cfl=cfl)
    if callback is not None:
        callback(field, state)
    while state.t < t_final:
        if state.step_count >= max_steps:
            raise NumericalError(f"step limit {max_steps} reached at t={state.t}")
        dt = compute_dt(system, field, cfl)
        last = state.t + dt >= t_final * (1.0 - 1e-14)
        if last:
            dt = t_final - state.t
        stats: dict = {}
        for attempt in range(MAX_RETRIES + 1):
            try:
                new = fv_step(system, field, dt, mode, supersonic, stats)
                break
            except StepFailure as exc:
                if attempt == MAX_RETRIES:
                    raise StepFailure(f"{exc} (t={state.t:.6g}, after {MAX_RETRIES} retries)") from exc
                log.info("step failed at t=%.6g with dt=%.3g, retrying with dt/2", state.t, dt)
                dt *= 0.5
                last = False
                state.retries += 1
        field = new
        state.t = t_final if last else state.t + dt
        state.dt = dt
        state.step_count += 1
        state.fallback_edges += stats.get("fallback_edges", 0)
        if callback is not None:
            callback(field, state)
    return field, state


def run(system, field: CellField, t_final: float, cfl: float, **kw) -> CellField:
    return integrate(system, field, t_final, cfl, **kw)[0]
