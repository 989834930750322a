"""Jump bounds between predicted edge values and the adjacent cell averages.

Around a vertical edge ``sigma = L|R`` the six-cell stencil
``L, R, UL, UR, BL, BR`` has seven edges:

    sigma  = L|R      sigma+  = UL|UR    sigma-  = BL|BR
    sigmaL+ = L|UL    sigmaR+ = R|UR     sigmaL- = BL|L    sigmaR- = BR|R

The predicted values at the corners and the midpoint differ from the cell
averages by at most a constant times the jumps across those edges.  For the
wave system the constants are explicit; for the linearized gas dynamics
operator a valid constant is read off the operator's coefficients at a frozen
linearization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import evo_euler, evo_wave

_2_PI = 2.0 / np.pi
STENCIL = ("L", "R", "UL", "UR", "BL", "BR")


def _mirror_y(U):
    U = np.array(U, dtype=float)
    U[2] = -U[2]
    return U


def _mirror_x(U):
    U = np.array(U, dtype=float)
    U[1] = -U[1]
    return U


def stencil_edges(st: dict) -> dict:
    """Jumps (out - in) across the seven stencil edges, keyed by edge name."""
    return {
        "s": st["R"] - st["L"],
        "s+": st["UR"] - st["UL"],
        "s-": st["BR"] - st["BL"],
        "L+": st["UL"] - st["L"],
        "R+": st["UR"] - st["R"],
        "L-": st["L"] - st["BL"],
        "R-": st["R"] - st["BR"],
    }


def _wave_upper_bounds(st):
    """Bounds on ``|U_L - U_A|`` and ``|U_L - U_S|`` per component, for the left cell."""
    J = {k: np.abs(v) for k, v in stencil_edges(st).items()}
    phi, u, v = 0, 1, 2
    A = np.stack(
        [
            0.5 * (J["s"][phi] + J["L+"][phi] + J["R+"][phi] + J["s"][u] + J["s+"][u] + J["R+"][v] + J["L+"][v]),
            0.5 * (J["s"][phi] + J["s+"][phi] + J["s"][u] + J["L+"][u] + J["R+"][u] + J["R+"][v] + J["L+"][v]),
            0.5 * (J["R+"][phi] + J["L+"][phi] + J["R+"][u] + J["L+"][u] + J["s"][v] + J["R+"][v] + J["L+"][v]),
        ]
    )
    S = np.stack(
        [
            _2_PI * (J["s"][phi] + J["s"][u]),
            _2_PI * (J["s"][phi] + J["s"][u]),
            0.5 * J["s"][v],
        ]
    )
    return A, S


def _flip_y(st):
    """Stencil mirrored across the edge's horizontal midline."""
    m = {k: _mirror_y(v) for k, v in st.items()}
    return {"L": m["L"], "R": m["R"], "UL": m["BL"], "UR": m["BR"], "BL": m["UL"], "BR": m["UR"]}


def _flip_x(st):
    """Stencil mirrored across the edge itself (left and right exchanged)."""
    m = {k: _mirror_x(v) for k, v in st.items()}
    return {"L": m["R"], "R": m["L"], "UL": m["UR"], "UR": m["UL"], "BL": m["BR"], "BR": m["BL"]}


@dataclass
class BoundCheck:
    """Observed differences and their bounds, both shaped ``(X, K, comp) + batch``."""

    diff: np.ndarray
    bound: np.ndarray

    def violations(self, slack: float = 1e-12) -> int:
        scale = 1.0 + self.bound
        return int(np.count_nonzero(self.diff > self.bound + slack * scale))


def wave_bounds(st: dict) -> BoundCheck:
    """Compare ``|U_K - U_X|`` with the explicit wave bounds for ``X in (A, S, B)``, ``K in (L, R)``.

    The lower corner and the right cell follow from mirror images of the
    stencil, under which the bounds for ``(A, L)`` and ``(S, L)`` transfer.
    """
    A = evo_wave.wave_evolve_A(st["L"], st["R"], st["UL"], st["UR"])
    S = evo_wave.wave_evolve_S(st["L"], st["R"])
    B = evo_wave.wave_evolve_B(st["L"], st["R"], st["BL"], st["BR"])
    diffs, bounds = [], []
    for X, flip in ((A, lambda s: s), (S, lambda s: s), (B, _flip_y)):
        row_d, row_b = [], []
        for K, side in (("L", lambda s: s), ("R", _flip_x)):
            bA, bS = _wave_upper_bounds(side(flip(st)))
            row_d.append(np.abs(st[K] - X))
            row_b.append(bS if X is S else bA)
        diffs.append(row_d)
        bounds.append(row_b)
    return BoundCheck(np.array(diffs), np.array(bounds))


def _euler_predict(st, lin_a, lin_s, lin_b):
    A = evo_euler.euler_evolve_corner(st["L"], st["R"], st["UL"], st["UR"], lin_a, upper=True, check=False)
    S = evo_euler.euler_evolve_S(st["L"], st["R"], lin_s, check=False)
    B = evo_euler.euler_evolve_corner(st["L"], st["R"], st["BL"], st["BR"], lin_b, upper=False, check=False)
    return np.stack([A, S, B])


def euler_bounds(st: dict, gas: evo_euler.GasParams) -> BoundCheck:
    """Compare ``|W_K - W_X|`` (primitive variables) with a coefficient-derived bound.

    At a frozen linearization each predicted value is affine in the stencil
    data, and it reproduces constant states, so ``W_K - W_X`` is a linear
    combination of cell values whose coefficients sum to zero for every input
    variable.  Such a combination is bounded by the sum of the absolute
    coefficients times the total jump along the stencil's seven edges.  The
    coefficients are obtained by probing the operator with unit data.
    """
    lin_a = evo_euler.linearize((st["L"], st["R"], st["UL"], st["UR"]), gas, strict=False)
    lin_b = evo_euler.linearize((st["L"], st["R"], st["BL"], st["BR"]), gas, strict=False)
    lin_s = evo_euler.linearize((st["L"], st["R"]), gas, strict=False)
    W = _euler_predict(st, lin_a, lin_s, lin_b)  # (3, 4) + batch
    batch = st["L"].shape[1:]

    zero = {k: np.zeros_like(st["L"]) for k in STENCIL}
    base = _euler_predict(zero, lin_a, lin_s, lin_b)
    coef = np.zeros((3, 4, len(STENCIL), 4) + batch)  # X, output comp, cell, input comp
    for ci, cell in enumerate(STENCIL):
        for q in range(4):
            probe = {k: v.copy() for k, v in zero.items()}
            probe[cell][q] = 1.0
            coef[:, :, ci, q] = _euler_predict(probe, lin_a, lin_s, lin_b) - base

    jump_total = sum(np.abs(j) for j in stencil_edges(st).values()).sum(axis=0)
    diffs, bounds = [], []
    for K in ("L", "R"):
        kidx = STENCIL.index(K)
        c = -coef.copy()
        for q in range(4):
            c[:, q, kidx, q] += 1.0  # coefficients of W_K - W_X
        C = np.max(np.sum(np.abs(c), axis=2), axis=2)  # (3, 4) + batch
        diffs.append(np.abs(st[K][None] - W))
        bounds.append(C * jump_total)
    diff = np.moveaxis(np.array(diffs), 0, 1)
    bound = np.moveaxis(np.array(bounds), 0, 1)
    return BoundCheck(diff, bound)


def random_wave_stencils(rng: np.random.Generator, n: int) -> dict:
    return {k: rng.normal(size=(3, n)) for k in STENCIL}


def random_gas_stencils(rng: np.random.Generator, n: int, spread: float = 0.3) -> dict:
    """Primitive stencils around a random subsonic base state."""
    base = np.stack(
        [rng.uniform(0.5, 2.0, n), rng.uniform(-0.3, 0.3, n), rng.uniform(-0.3, 0.3, n), rng.uniform(0.5, 2.0, n)]
    )
    out = {}
    for k in STENCIL:
        W = base * (1.0 + spread * rng.uniform(-1.0, 1.0, base.shape))
        W[1:3] = base[1:3] + spread * rng.uniform(-1.0, 1.0, (2, n))
        out[k] = W
    return out
