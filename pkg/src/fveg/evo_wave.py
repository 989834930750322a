"""EG2 point-value predictors for the linear wave system.

States are arrays whose leading axis holds ``(phi, u, v)``; any trailing
shape is carried through, so the same functions evaluate one stencil or a
whole grid of them.  Formulas are written for a vertical edge ``L|R`` with
normal ``+x``; horizontal edges are handled by the caller through the
reflection ``x <-> y, (u, v) -> (v, u)``.

The value at the foot point ``P'`` (the edge midpoint or the corner itself)
sits on a discontinuity of piecewise-constant data and is taken as the
arithmetic mean of the adjacent cells.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

_1_PI = 1.0 / np.pi
_2_PI = 2.0 / np.pi


@dataclass(frozen=True)
class WaveParams:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigurationError(f"wave speed must be positive, got {self.c!r}")


def wave_evolve_S(L, R) -> np.ndarray:
    """Predicted state at the midpoint of the edge ``L|R``."""
    pL, uL, vL = np.asarray(L, dtype=float)
    pR, uR, vR = np.asarray(R, dtype=float)
    return np.stack(
        [
            0.5 * (pL + pR) - _2_PI * (uR - uL),
            -_2_PI * (pR - pL) + 0.5 * (uR + uL),
            0.5 * (vR + vL),
        ]
    )


def wave_evolve_A(L, R, UL, UR) -> np.ndarray:
    """Predicted state at the upper corner of ``L|R`` (cells L, R, UL, UR around it)."""
    pL, uL, vL = np.asarray(L, dtype=float)
    pR, uR, vR = np.asarray(R, dtype=float)
    pUL, uUL, vUL = np.asarray(UL, dtype=float)
    pUR, uUR, vUR = np.asarray(UR, dtype=float)
    phi = (
        0.25 * (pR + pUR + pUL + pL)
        - _1_PI * (uR + uUR - uUL - uL)
        + _1_PI * (vR - vUR - vUL + vL)
    )
    u = (
        -_1_PI * (pR + pUR - pUL - pL)
        + 0.25 * (uR + uUR + uUL + uL)
        + _1_PI * (-vR + vUR - vUL + vL)
    )
    v = (
        _1_PI * (pR - pUR - pUL + pL)
        + _1_PI * (-uR + uUR - uUL + uL)
        + 0.25 * (vR + vUR + vUL + vL)
    )
    return np.stack([phi, u, v])


def _mirror(U):
    U = np.array(U, dtype=float)
    U[2] = -U[2]
    return U


def wave_evolve_B(L, R, BL, BR) -> np.ndarray:
    """Predicted state at the lower corner, by mirroring the upper-corner operator in y."""
    return _mirror(wave_evolve_A(_mirror(L), _mirror(R), _mirror(BL), _mirror(BR)))
