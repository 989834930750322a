"""Physics of the two hyperbolic systems: fluxes, eigenstructure and entropy.

Both systems share one interface so the flux assembly and the entropy
diagnostics can treat them alike.  Conserved states carry the component axis
first: ``(phi, u, v)`` for the wave system and ``(rho, m1, m2, E)`` for gas
dynamics.  All methods work in the x-direction; the y-direction follows from
:meth:`reflect`, which swaps the two vector components.

Eigenvector matrices are returned with shape ``batch + (N, N)`` and hold unit
right eigenvectors in their columns, ordered by increasing eigenvalue.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import evo_euler, evo_wave
from .errors import ConfigurationError, PredictionFailure, StateValidityError, SupersonicLinearization
from .evo_euler import GasParams, cons_to_prim
from .grid import neighbor

SUPERSONIC_POLICIES = ("fallback", "geometric")


def _unit_columns(R: np.ndarray) -> np.ndarray:
    return R / np.linalg.norm(R, axis=-2, keepdims=True)


def _first_bad(mask):
    idx = np.argwhere(np.atleast_1d(mask))
    return tuple(int(k) for k in idx[0]) if len(idx) else None


class _System:
    name: str
    ncomp: int
    components: tuple[str, ...]

    @staticmethod
    def reflect(U: np.ndarray) -> np.ndarray:
        """Swap the x and y vector components (mirror across the diagonal)."""
        U = np.asarray(U, dtype=float)
        return U[[0, 2, 1] + list(range(3, U.shape[0]))]

    def flux_y(self, U: np.ndarray) -> np.ndarray:
        return self.reflect(self.flux_x(self.reflect(U)))

    def flux(self, U: np.ndarray, normal) -> np.ndarray:
        nx, ny = normal
        return nx * self.flux_x(U) + ny * self.flux_y(U)

    def eigensystem(self, U: np.ndarray):
        """Eigenvalues and unit right eigenvectors of the x-Jacobian at one state."""
        return self.roe_eigensystem(U, U)


@dataclass(frozen=True)
class WaveSystem(_System):
    """Linear acoustics ``phi_t + c div(u) = 0``, ``u_t + c grad(phi) = 0``."""

    params: evo_wave.WaveParams = field(default_factory=evo_wave.WaveParams)
    name = "wave"
    ncomp = 3
    components = ("phi", "u", "v")

    @property
    def c(self) -> float:
        return self.params.c

    def flux_x(self, U):
        phi, u, _ = np.asarray(U, dtype=float)
        return np.stack([self.c * u, self.c * phi, np.zeros_like(phi)])

    def jacobian_x(self, U):
        U = np.asarray(U, dtype=float)
        A = np.zeros(U.shape[1:] + (3, 3))
        A[..., 0, 1] = A[..., 1, 0] = self.c
        return A

    def eigenvalues(self, U):
        U = np.asarray(U, dtype=float)
        one = np.ones(U.shape[1:])
        return np.stack([-self.c * one, 0.0 * one, self.c * one])

    def roe_eigensystem(self, UL, UR):
        UL = np.asarray(UL, dtype=float)
        s = 1.0 / np.sqrt(2.0)
        R = np.array([[s, 0.0, s], [-s, 0.0, s], [0.0, 1.0, 0.0]])
        R = np.broadcast_to(R, UL.shape[1:] + (3, 3)).copy()
        return self.eigenvalues(UL), R

    def admissible(self, U):
        U = np.asarray(U, dtype=float)
        return np.all(np.isfinite(U), axis=0)

    def entropy(self, U):
        U = np.asarray(U, dtype=float)
        return -0.5 * np.sum(U * U, axis=0)

    def max_speeds(self, data):
        return float(self.c)

    def eg_flux_x(self, data, strict: bool = False, supersonic: str = "fallback"):
        """Simpson EG flux on every vertical edge of ``data`` ``(3, ny, nx)``.

        Returns the flux array and a mask of edges needing a fallback (always
        ``None`` here: the wave predictors cannot fail).
        """
        U, R, UL, UR = data, neighbor(data, 1, 0), neighbor(data, 0, 1), neighbor(data, 1, 1)
        corner = evo_wave.wave_evolve_A(U, R, UL, UR)  # at (i + 1/2, j + 1/2)
        mid = evo_wave.wave_evolve_S(U, R)
        A = corner
        B = neighbor(corner, 0, -1)
        F = (self.flux_x(A) + 4.0 * self.flux_x(mid) + self.flux_x(B)) / 6.0
        return F, None

    def eg_flux_stencil(self, L, R, UL, UR, BL, BR, strict: bool = True, supersonic: str = "fallback"):
        """Simpson EG flux for one vertical edge from its six-cell stencil."""
        A = evo_wave.wave_evolve_A(L, R, UL, UR)
        S = evo_wave.wave_evolve_S(L, R)
        B = evo_wave.wave_evolve_B(L, R, BL, BR)
        return (self.flux_x(A) + 4.0 * self.flux_x(S) + self.flux_x(B)) / 6.0


@dataclass(frozen=True)
class EulerSystem(_System):
    """Compressible Euler equations for a polytropic gas."""

    gas: GasParams = field(default_factory=GasParams)
    name = "euler"
    ncomp = 4
    components = ("rho", "m1", "m2", "E")

    @property
    def gamma(self) -> float:
        return self.gas.gamma

    def primitive(self, U):
        return cons_to_prim(U, self.gas)

    def flux_x(self, U):
        rho, u, v, p = self.primitive(U)
        return self.flux_x_prim(np.stack([rho, u, v, p]))

    def flux_x_prim(self, W):
        rho, u, v, p = np.asarray(W, dtype=float)
        E = p / (self.gamma - 1.0) + 0.5 * rho * (u * u + v * v)
        return np.stack([rho * u, rho * u * u + p, rho * u * v, u * (E + p)])

    def admissible(self, U):
        U = np.asarray(U, dtype=float)
        rho, m1, m2, E = U
        with np.errstate(divide="ignore", invalid="ignore"):
            eint = E - 0.5 * (m1 * m1 + m2 * m2) / rho
        return np.all(np.isfinite(U), axis=0) & (rho > 0) & (eint > 0)

    def _uvHc(self, U):
        rho, u, v, p = self.primitive(U)
        H = (U[3] + p) / rho
        return u, v, H, np.sqrt(self.gamma * p / rho)

    def eigenvalues(self, U):
        u, _, _, c = self._uvHc(np.asarray(U, dtype=float))
        return np.stack([u - c, u, u, u + c])

    def jacobian_x(self, U):
        u, v, H, _ = self._uvHc(np.asarray(U, dtype=float))
        g, gh = self.gamma, self.gamma - 1.0
        q2 = u * u + v * v
        z, o = np.zeros_like(u), np.ones_like(u)
        rows = [
            [z, o, z, z],
            [0.5 * gh * q2 - u * u, (3.0 - g) * u, -gh * v, gh * o],
            [-u * v, v, u, z],
            [u * (0.5 * gh * q2 - H), H - gh * u * u, -gh * u * v, g * u],
        ]
        return np.moveaxis(np.array(rows), (0, 1), (-2, -1))

    def _eigvecs(self, u, v, H, c):
        q2 = u * u + v * v
        z, o = np.zeros_like(u), np.ones_like(u)
        cols = [
            [o, u - c, v, H - u * c],
            [o, u, v, 0.5 * q2],
            [z, z, o, v],
            [o, u + c, v, H + u * c],
        ]
        R = np.moveaxis(np.array(cols), (0, 1), (-1, -2))
        return _unit_columns(R)

    def roe_eigensystem(self, UL, UR):
        """Roe-averaged eigenvalues and unit right eigenvectors."""
        UL, UR = np.asarray(UL, dtype=float), np.asarray(UR, dtype=float)
        uL, vL, HL, _ = self._uvHc(UL)
        uR, vR, HR, _ = self._uvHc(UR)
        sL, sR = np.sqrt(UL[0]), np.sqrt(UR[0])
        w = sL + sR
        u = (sL * uL + sR * uR) / w
        v = (sL * vL + sR * vR) / w
        H = (sL * HL + sR * HR) / w
        c2 = (self.gamma - 1.0) * (H - 0.5 * (u * u + v * v))
        if np.any(~(c2 > 0)):
            raise StateValidityError("Roe average has non-positive sound speed", _first_bad(~(c2 > 0)))
        c = np.sqrt(c2)
        return np.stack([u - c, u, u, u + c]), self._eigvecs(u, v, H, c)

    def entropy(self, U):
        rho, _, _, p = self.primitive(U)
        return rho * np.log(p / rho**self.gamma) / (self.gamma - 1.0)

    def max_speeds(self, data):
        """Largest ``max(|u'|+c', |v'|+c')`` over cell, edge and corner linearizations."""
        W = self.primitive(data)
        samples = [W, 0.5 * (W + neighbor(W, 1, 0)), 0.5 * (W + neighbor(W, 0, 1))]
        samples.append(0.25 * (W + neighbor(W, 1, 0) + neighbor(W, 0, 1) + neighbor(W, 1, 1)))
        smax = 0.0
        for rho, u, v, p in samples:
            c = np.sqrt(self.gamma * p / rho)
            smax = max(smax, float(np.max(np.maximum(np.abs(u), np.abs(v)) + c)))
        if not np.isfinite(smax):
            raise StateValidityError("non-finite wave speed")
        return smax

    def _predict(self, cells, lin, corner):
        if corner:
            W = evo_euler.euler_evolve_corner(*cells, lin, upper=True, check=False)
        else:
            W = evo_euler.euler_evolve_S(*cells, lin, check=False)
        sup = ~lin.subsonic
        bad_state = ~((W[0] > 0) & (W[3] > 0))
        return W, sup, bad_state

    def _raise(self, sup, bad_state):
        if np.any(sup):
            raise SupersonicLinearization("supersonic linearization on an EG edge", _first_bad(sup))
        if np.any(bad_state):
            raise PredictionFailure("inadmissible EG2 prediction", _first_bad(bad_state))

    def eg_flux_x(self, data, strict: bool = False, supersonic: str = "fallback"):
        """Simpson EG flux on every vertical edge of ``data`` ``(4, ny, nx)``.

        Corner predictions are computed once per grid vertex and shared by
        the two vertical edges touching it.  Returns ``(flux, bad)`` where
        ``bad`` flags edges whose traces are unusable (supersonic
        linearization under the fallback policy, or inadmissible predicted
        states).  With ``strict`` the first such edge raises instead.
        """
        if supersonic not in SUPERSONIC_POLICIES:
            raise ConfigurationError(f"supersonic policy must be one of {SUPERSONIC_POLICIES}")
        W = self.primitive(data)
        R, UL, UR = neighbor(W, 1, 0), neighbor(W, 0, 1), neighbor(W, 1, 1)
        lin_c = evo_euler.linearize((W, R, UL, UR), self.gas, strict=False)
        Wc, sup_c, bad_c = self._predict((W, R, UL, UR), lin_c, True)
        lin_s = evo_euler.linearize((W, R), self.gas, strict=False)
        Ws, sup_s, bad_s = self._predict((W, R), lin_s, False)

        sup = sup_s | sup_c | neighbor(sup_c, 0, -1)
        bad_state = bad_s | bad_c | neighbor(bad_c, 0, -1)
        if supersonic == "geometric":
            sup = np.zeros_like(sup)
        if strict:
            self._raise(sup, bad_state)
        F = (self.flux_x_prim(Wc) + 4.0 * self.flux_x_prim(Ws) + self.flux_x_prim(neighbor(Wc, 0, -1))) / 6.0
        bad = sup | bad_state
        return F, (bad if bad.any() else None)

    def eg_flux_stencil(self, L, R, UL, UR, BL, BR, strict: bool = True, supersonic: str = "fallback"):
        """Simpson EG flux for one vertical edge from its six-cell stencil.

        The lower corner is predicted with the mirrored operator, independently
        of the grid-wide corner cache.
        """
        Wl, Wr, Wul, Wur, Wbl, Wbr = (self.primitive(X) for X in (L, R, UL, UR, BL, BR))
        lin_a = evo_euler.linearize((Wl, Wr, Wul, Wur), self.gas, strict=False)
        lin_b = evo_euler.linearize((Wl, Wr, Wbl, Wbr), self.gas, strict=False)
        lin_s = evo_euler.linearize((Wl, Wr), self.gas, strict=False)
        A = evo_euler.euler_evolve_corner(Wl, Wr, Wul, Wur, lin_a, upper=True, check=False)
        B = evo_euler.euler_evolve_corner(Wl, Wr, Wbl, Wbr, lin_b, upper=False, check=False)
        S = evo_euler.euler_evolve_S(Wl, Wr, lin_s, check=False)
        if strict:
            sup = ~(lin_a.subsonic & lin_b.subsonic & lin_s.subsonic)
            if supersonic == "geometric":
                sup = np.zeros_like(sup)
            bad = np.zeros_like(sup)
            for X in (A, B, S):
                bad = bad | ~((X[0] > 0) & (X[3] > 0))
            self._raise(sup, bad)
        return (self.flux_x_prim(A) + 4.0 * self.flux_x_prim(S) + self.flux_x_prim(B)) / 6.0


def make_system(name: str, **params) -> _System:
    if name == "wave":
        return WaveSystem(evo_wave.WaveParams(**params))
    if name == "euler":
        return EulerSystem(GasParams(**params))
    raise ConfigurationError(f"unknown system {name!r}; expected 'wave' or 'euler'")
