"""Small hand-made node sequences for curve-level tests."""

from types import SimpleNamespace

import numpy as np


def node_sequence(points, n_min=0, markers=()):
    pts = np.asarray(points, dtype=np.complex128)
    return SimpleNamespace(
        points=pts,
        n_min=n_min,
        n_max=n_min + len(pts) - 1,
        markers=lambda: list(markers),
    )


# ten unit steps on [-5, 5] whose direction changes at exactly five nodes
STAIR_STEPS = [1, 1j, 1j, 1, 1, 1j, 1j, 1, 1, 1j]


def staircase():
    pts = np.concatenate([[0], np.cumsum(STAIR_STEPS)])
    markers = [(n, "H" if d == 1 else "V", "plus" if n >= 0 else "minus")
               for n, d in zip(range(-5, 5), STAIR_STEPS)]
    return node_sequence(pts, -5, markers)
