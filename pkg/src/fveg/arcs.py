"""Closed-form arc integrals over the base circle of the bicharacteristic cone.

A point ``Q(theta)`` on the base circle lies at ``P' + r (cos theta, sin theta)``
with ``P' = P - (u', v') tau`` and ``r = c' tau``.  Relative to the corner
``P`` it therefore sits at ``tau * (c' cos theta - u', c' sin theta - v')``:
right of the corner when ``cos theta > a`` and above it when
``sin theta > b``, where ``a = u'/c'`` and ``b = v'/c'``.  The circle is cut
into at most four arcs, one per quadrant cell.

For every quadrant we return the integrals of the six angular weights that
appear in the EG2 operators::

    1, cos, sin, 2cos^2 - 1/2, 2 sin cos, 2 sin^2 - 1/2

Values of ``|a| >= 1`` or ``|b| >= 1`` are handled too: the corresponding
half-plane then contains the whole circle or none of it.
"""
from __future__ import annotations

import numpy as np

# quadrant order used throughout: right-lower, right-upper, left-upper, left-lower
R, UR, UL, L = 0, 1, 2, 3
NMOMENTS = 6
TWO_PI = 2.0 * np.pi


def _antiderivatives(theta: np.ndarray) -> np.ndarray:
    s2 = np.sin(2.0 * theta)
    return np.stack(
        [
            theta,
            np.sin(theta),
            -np.cos(theta),
            0.5 * theta + 0.5 * s2,
            -0.5 * np.cos(2.0 * theta),
            0.5 * theta - 0.5 * s2,
        ]
    )


def quadrant_moments(a, b) -> np.ndarray:
    """Arc moments around a corner, shape ``(4, 6) + broadcast(a, b).shape``."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    ac = np.arccos(np.clip(a, -1.0, 1.0))
    bs = np.arcsin(np.clip(b, -1.0, 1.0))
    cuts = np.stack([ac, -ac, bs, np.pi - bs]) % TWO_PI
    cuts = np.sort(cuts, axis=0)
    cuts = np.concatenate([cuts, cuts[:1] + TWO_PI])

    out = np.zeros((4, NMOMENTS) + a.shape)
    prim = _antiderivatives(cuts)
    for k in range(4):
        lo, hi = cuts[k], cuts[k + 1]
        mid = 0.5 * (lo + hi)
        right = np.cos(mid) > a
        up = np.sin(mid) > b
        quad = np.where(right, np.where(up, UR, R), np.where(up, UL, L))
        piece = prim[:, k + 1] - prim[:, k]
        for q in range(4):
            out[q] += np.where(quad == q, piece, 0.0)
    return out


def edge_moments(a) -> np.ndarray:
    """Arc moments around an edge midpoint: shape ``(2, 6) + a.shape`` for (left, right) cells.

    Only the sign of ``cos theta - a`` decides the cell, so the quadrant
    moments are merged pairwise.
    """
    m = quadrant_moments(a, 0.0)
    return np.stack([m[UL] + m[L], m[R] + m[UR]])


def host_weights_edge(u) -> np.ndarray:
    """Weights of the (left, right) cells in the value at the foot point ``P'``.

    ``P'`` is displaced by ``-u' tau`` from the edge, so it lies in the left
    cell for ``u' > 0``; a foot point exactly on the edge takes the average.
    """
    u = np.asarray(u, dtype=float)
    wr = np.where(u < 0, 1.0, np.where(u > 0, 0.0, 0.5))
    return np.stack([1.0 - wr, wr])


def host_weights_corner(u, v) -> np.ndarray:
    """Weights of the quadrant cells (R, UR, UL, L order) at the foot point of a corner."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    right = np.where(u < 0, 1.0, np.where(u > 0, 0.0, 0.5))
    up = np.where(v < 0, 1.0, np.where(v > 0, 0.0, 0.5))
    return np.stack(
        [right * (1 - up), right * up, (1 - right) * up, (1 - right) * (1 - up)]
    )
