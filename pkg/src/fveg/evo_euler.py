"""EG2 point-value predictors for the locally linearized Euler equations.

Primitive states are arrays with leading axis ``(rho, u, v, p)``; conserved
ones use ``(rho, m1, m2, E)``.  All operators broadcast over trailing axes.

The predictors evaluate the arc integrals of the linearized evolution
operator exactly for piecewise-constant data.  The base circle is centred at
the foot point ``P' = P - (u', v') dt/2``; the cell hosting ``P'`` supplies
the point values ``rho_P'`` and ``p_P'`` (upwind by the sign of the frozen
velocity, the mean of the candidate cells on a tie).

The density predictor follows from transporting ``rho - p/c'^2`` along the
particle path and inserting the pressure predictor, which gives the
``-2 p_P'/c'^2`` term; this is what makes constant states exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import arcs
from .errors import ConfigurationError, PredictionFailure, StateValidityError, SupersonicLinearization


@dataclass(frozen=True)
class GasParams:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1:
            raise ConfigurationError(f"adiabatic exponent must exceed 1, got {self.gamma!r}")

    @property
    def cv(self) -> float:
        return 1.0 / (self.gamma - 1.0)


def _first_bad(mask):
    idx = np.argwhere(np.atleast_1d(mask))
    return tuple(int(k) for k in idx[0]) if len(idx) else None


def cons_to_prim(U, gas: GasParams) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    rho, m1, m2, E = U
    if np.any(~(rho > 0)):
        raise StateValidityError(
            f"non-positive density at cell {_first_bad(~(rho > 0))}", _first_bad(~(rho > 0))
        )
    u = m1 / rho
    v = m2 / rho
    eint = E - 0.5 * rho * (u * u + v * v)
    if np.any(~(eint > 0)):
        raise StateValidityError(
            f"non-positive internal energy at cell {_first_bad(~(eint > 0))}",
            _first_bad(~(eint > 0)),
        )
    return np.stack([rho, u, v, (gas.gamma - 1.0) * eint])


def prim_to_cons(V, gas: GasParams) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    rho, u, v, p = V
    bad = ~((rho > 0) & (p > 0))
    if np.any(bad):
        raise StateValidityError(f"inadmissible primitive state at cell {_first_bad(bad)}", _first_bad(bad))
    return np.stack([rho, rho * u, rho * v, p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v)])


@dataclass(frozen=True)
class LinState:
    """Frozen linearization state at a prediction point.

    ``alpha``, ``alpha1`` and ``alpha2`` are clipped into the real range, so
    for supersonic data they describe the degenerate arc layout; check
    ``subsonic`` before relying on the subsonic formulas.
    """

    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    p: np.ndarray
    c: np.ndarray
    alpha: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray

    @property
    def subsonic(self) -> np.ndarray:
        return (np.abs(self.u) <= self.c) & (np.abs(self.v) <= self.c)

    def mirrored(self) -> "LinState":
        return _lin_from_means(self.rho, self.u, -self.v, self.p, self.c)


def _lin_from_means(rho, u, v, p, c):
    a = np.clip(u / c, -1.0, 1.0)
    b = np.clip(v / c, -1.0, 1.0)
    alpha = np.arccos(a)
    return LinState(rho, u, v, p, c, alpha, np.arcsin(b), alpha)


def linearize(neighbors, gas: GasParams, strict: bool = True) -> LinState:
    """Average the neighbouring primitive states (2 for an edge, 4 for a corner)."""
    W = np.mean(np.stack([np.asarray(n, dtype=float) for n in neighbors]), axis=0)
    rho, u, v, p = W
    bad = ~((rho > 0) & (p > 0))
    if np.any(bad):
        raise StateValidityError("inadmissible linearization state", _first_bad(bad))
    c = np.sqrt(gas.gamma * p / rho)
    lin = _lin_from_means(rho, u, v, p, c)
    if strict:
        sup = ~lin.subsonic
        if np.any(sup):
            raise SupersonicLinearization(
                f"local Mach number exceeds 1 (u'={np.ravel(u)[0]:.6g}, v'={np.ravel(v)[0]:.6g}, "
                f"c'={np.ravel(c)[0]:.6g})",
                _first_bad(sup),
            )
    return lin


def _evolve(cells, moments, host, lin: LinState) -> np.ndarray:
    """Generic EG2 evaluation: ``cells`` (ncell, 4, ...), ``moments`` (ncell, 6, ...)."""
    rho_h = np.sum(host * cells[:, 0], axis=0)
    p_h = np.sum(host * cells[:, 3], axis=0)
    p, u, v = cells[:, 3], cells[:, 1], cells[:, 2]
    I0, Ic, Is, Icc, Isc, Iss = (moments[:, k] for k in range(6))
    P0 = np.sum(p * I0, axis=0)
    Pc = np.sum(p * Ic, axis=0)
    Ps = np.sum(p * Is, axis=0)
    Ud = np.sum(u * Ic + v * Is, axis=0)
    Uu = np.sum(u * Icc + v * Isc, axis=0)
    Vv = np.sum(u * Isc + v * Iss, axis=0)
    rc = lin.rho * lin.c
    c2 = lin.c * lin.c
    inv_pi = 1.0 / np.pi
    rho_P = rho_h - 2.0 * p_h / c2 + inv_pi * (P0 / c2 - (lin.rho / lin.c) * Ud)
    u_P = inv_pi * (-Pc / rc + Uu)
    v_P = inv_pi * (-Ps / rc + Vv)
    p_P = -p_h + inv_pi * (P0 - rc * Ud)
    return np.stack([rho_P, u_P, v_P, p_P])


def _check(W, check):
    if check:
        bad = ~((W[0] > 0) & (W[3] > 0))
        if np.any(bad):
            raise PredictionFailure("EG2 prediction is inadmissible", _first_bad(bad))
    return W


def euler_evolve_S(L, R, lin: LinState, check: bool = True) -> np.ndarray:
    """Predicted primitive state at the midpoint of the vertical edge ``L|R``."""
    cells = np.stack([np.asarray(L, dtype=float), np.asarray(R, dtype=float)])
    moments = arcs.edge_moments(lin.u / lin.c)
    host = arcs.host_weights_edge(lin.u)
    return _check(_evolve(cells, moments, host, lin), check)


def _mirror(W):
    W = np.array(W, dtype=float)
    W[2] = -W[2]
    return W


def euler_evolve_corner(L, R, UL, UR, lin: LinState, upper: bool = True, check: bool = True) -> np.ndarray:
    """Predicted primitive state at a corner of the edge ``L|R``.

    For ``upper=True`` the corner is the top end of the edge and ``UL, UR``
    are the cells above ``L, R``.  For ``upper=False`` pass the cells below
    (``BL, BR``) in their place; the corner is then evaluated in the frame
    mirrored across the edge's horizontal midline.
    """
    if not upper:
        W = euler_evolve_corner(
            _mirror(L), _mirror(R), _mirror(UL), _mirror(UR), lin.mirrored(), upper=True, check=False
        )
        return _check(_mirror(W), check)
    cells = np.stack([np.asarray(X, dtype=float) for X in (R, UR, UL, L)])
    moments = arcs.quadrant_moments(lin.u / lin.c, lin.v / lin.c)
    host = arcs.host_weights_corner(lin.u, lin.v)
    return _check(_evolve(cells, moments, host, lin), check)
