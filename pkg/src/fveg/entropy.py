"""Entropy diagnostics: entropy-conservative viscosities, the viscosity bound and BV monitors.

The entropy-conservative viscosity of wave family ``j`` across an edge is

    q*_j = int_{-1/2}^{1/2} 2 xi <A(U(xi)) r_j, r_j> dxi,

taken along the straight segment ``U(xi) = (U^j + U^{j+1})/2 + xi alpha_j r_j``
between consecutive intermediate states of the Roe wave decomposition.  The
entropy-stable flux is safe for that family when ``q*_j`` does not exceed its
modified viscosity ``q~_j``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.integrate import quad_vec

from .errors import PathFailure, StateValidityError
from .flux import TimeState, _columns, decompose_jump
from .grid import CellField, jumps

QUAD_EPSABS = 1e-10
BOUND_SLACK = 1e-10
_PATH_SAMPLES = np.linspace(-0.5, 0.5, 33)


def _path_integrand(system, mid, step, r):
    """``xi -> 2 xi <A(mid + xi step) r, r>`` for a batch of segments, flattened."""

    def f(xi):
        U = mid + xi * step
        A = system.jacobian_x(U)
        Ar = np.einsum("...ik,k...->i...", A, r)
        return (2.0 * xi * np.sum(Ar * r, axis=0)).ravel()

    return f


def ec_viscosities(system, UL, UR, epsabs: float = QUAD_EPSABS) -> np.ndarray:
    """Entropy-conservative viscosities ``q*_j`` for every wave family, shape ``(N,) + batch``."""
    UL, UR = np.asarray(UL, dtype=float), np.asarray(UR, dtype=float)
    dec = decompose_jump(system, UL, UR)
    batch = UL.shape[1:]
    out = np.empty((UL.shape[0],) + batch)
    for j, r in enumerate(_columns(dec.R)):
        a, b = dec.states[j], dec.states[j + 1]
        mid, step = 0.5 * (a + b), dec.alpha[j] * r
        for xi in _PATH_SAMPLES:
            if not np.all(system.admissible(mid + xi * step)):
                raise PathFailure(f"inadmissible state on the path of wave {j}")
        try:
            val, _ = quad_vec(_path_integrand(system, mid, step, r), -0.5, 0.5, epsabs=epsabs, epsrel=0.0, norm="max")
        except StateValidityError as exc:
            raise PathFailure(f"inadmissible state on the path of wave {j}: {exc}") from exc
        out[j] = np.reshape(val, batch)
    return out


def ec_viscosity(system, UL, UR, j: int) -> float:
    """Entropy-conservative viscosity of wave family ``j`` for one pair of states."""
    q = ec_viscosities(system, np.asarray(UL, dtype=float)[:, None], np.asarray(UR, dtype=float)[:, None])
    return float(q[j, 0])


@dataclass
class WaveBound:
    j: int
    lam: float
    qstar: float
    qtilde: float

    @property
    def margin(self) -> float:
        return self.qtilde - self.qstar

    @property
    def bound_ok(self) -> bool:
        return self.qstar <= self.qtilde + BOUND_SLACK


def check_lemma31(system, UL, UR) -> list[WaveBound]:
    """Compare ``q*_j`` with the modified viscosity ``q~_j`` for each family of one pair."""
    UL = np.asarray(UL, dtype=float)[:, None]
    UR = np.asarray(UR, dtype=float)[:, None]
    dec = decompose_jump(system, UL, UR)
    qstar = ec_viscosities(system, UL, UR)
    return [WaveBound(j, float(dec.lam[j, 0]), float(qstar[j, 0]), float(dec.q[j, 0])) for j in range(UL.shape[0])]


def random_small_jump_pairs(system, n: int, rng: np.random.Generator, rel: float = 0.09):
    """Random admissible gas states and neighbours with ``|U_R - U_L| <= rel |U_L|``.

    With ``rel = 0.09`` the jump stays below a tenth of the mean state.
    """
    from .evo_euler import prim_to_cons

    W = np.stack(
        [rng.uniform(0.5, 2.0, n), rng.uniform(-1.0, 1.0, n), rng.uniform(-1.0, 1.0, n), rng.uniform(0.5, 2.0, n)]
    )
    UL = prim_to_cons(W, system.gas)
    d = rng.normal(size=UL.shape)
    d /= np.linalg.norm(d, axis=0)
    d *= rel * rng.uniform(0.0, 1.0, n) * np.linalg.norm(UL, axis=0)
    UR = UL + d
    keep = system.admissible(UR)
    return UL[:, keep], UR[:, keep]


def lemma31_campaign(system, n: int = 10_000, seed: int = 0, csv_path: Optional[Path] = None, chunk: int = 2000):
    """Randomized check of ``q*_j <= q~_j``; returns ``(rows, all_ok)``.

    Each row is ``(sample id, j, lambda, q*, q~, margin, ok)``.
    """
    rng = np.random.default_rng(seed)
    UL, UR = random_small_jump_pairs(system, n, rng)
    rows = []
    for start in range(0, UL.shape[1], chunk):
        sl = slice(start, start + chunk)
        dec = decompose_jump(system, UL[:, sl], UR[:, sl])
        qs = ec_viscosities(system, UL[:, sl], UR[:, sl])
        for k in range(qs.shape[1]):
            for j in range(qs.shape[0]):
                q, qt = float(qs[j, k]), float(dec.q[j, k])
                rows.append((start + k, j, float(dec.lam[j, k]), q, qt, qt - q, q <= qt + BOUND_SLACK))
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample", "j", "lambda", "qstar", "qtilde", "margin", "ok"])
            for row in rows:
                w.writerow([row[0], row[1], repr(row[2]), repr(row[3]), repr(row[4]), repr(row[5]), int(row[6])])
    return rows, all(r[6] for r in rows)


def bv_functional(field: CellField) -> float:
    """``sum_sigma |sigma| |[[U]]_sigma|^2`` over all edges (conserved variables)."""
    total = 0.0
    for orientation in ("x", "y"):
        J = jumps(field.data, orientation)
        total += float(np.sum(J * J))
    return total * field.grid.edge_measure


def total_entropy(system, field: CellField) -> float:
    """``sum_K |K| S(U_K)``."""
    return float(np.sum(system.entropy(field.data))) * field.grid.cell_measure


@dataclass
class EntropyReport:
    """Per-step entropy and BV monitor, usable as an :func:`fveg.flux.integrate` callback."""

    system: object
    times: list = field(default_factory=list)
    entropy: list = field(default_factory=list)
    production: list = field(default_factory=list)
    bv: list = field(default_factory=list)
    bv_integral: float = 0.0

    def __call__(self, fld: CellField, state: TimeState):
        S = total_entropy(self.system, fld)
        B = bv_functional(fld)
        if self.entropy:
            self.production.append(S - self.entropy[-1])
            self.bv_integral += state.dt * B
        self.times.append(state.t)
        self.entropy.append(S)
        self.bv.append(B)

    @property
    def scale(self) -> float:
        return max(abs(s) for s in self.entropy) if self.entropy else 0.0

    def min_production(self) -> float:
        return min(self.production) if self.production else 0.0

    def nondecreasing(self, rel: float = 1e-10) -> bool:
        return self.min_production() >= -rel * self.scale
