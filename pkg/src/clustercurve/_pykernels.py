"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""

import numpy as np

_CHUNK = 2048


def embed(z):
    """Rows (u_re, u_im, 1/s, hypot(1, |z|)/s) with s = max(1, |z|).

    Infinity (any infinite component) maps to (1, 0, 0, 1), so that the
    chordal distance of two rows is 2|u_a i_b - u_b i_a| / (h_a h_b)
    for finite and infinite points alike, without overflow.
    """
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty((z.shape[0], 4))
    inf = np.isinf(z.real) | np.isinf(z.imag)
    r = np.abs(np.where(inf, 0, z))
    big = r > 1.0
    s = np.where(big, 1.0 / np.where(big, r, 1.0), 1.0)
    out[:, 0] = np.where(big, z.real * s, z.real)
    out[:, 1] = np.where(big, z.imag * s, z.imag)
    out[:, 2] = s
    out[:, 3] = np.where(big, np.hypot(s, 1.0), np.hypot(1.0, r))
    out[inf] = (1.0, 0.0, 0.0, 1.0)
    return out


def _pairwise(ea, eb):
    dx = ea[:, None, 0] * eb[None, :, 2] - eb[None, :, 0] * ea[:, None, 2]
    dy = ea[:, None, 1] * eb[None, :, 2] - eb[None, :, 1] * ea[:, None, 2]
    return 2.0 * np.hypot(dx, dy) / (ea[:, None, 3] * eb[None, :, 3])


def directed_hausdorff(a, b):
    ea, eb = embed(a), embed(b)
    best = 0.0
    for lo in range(0, len(ea), _CHUNK):
        d = _pairwise(ea[lo:lo + _CHUNK], eb)
        best = max(best, float(d.min(axis=1).max()))
    return best


def diameter(a):
    ea = embed(a)
    best = 0.0
    for lo in range(0, len(ea), _CHUNK):
        best = max(best, float(_pairwise(ea[lo:lo + _CHUNK], ea).max()))
    return best


def chebval(c, x):
    c = np.asarray(c, dtype=np.complex128)
    x = np.asarray(x, dtype=np.float64)
    if len(c) == 0:
        return np.zeros(len(x), dtype=np.complex128)
    x2 = 2.0 * x
    b1 = np.zeros(len(x), dtype=np.complex128)
    b2 = np.zeros(len(x), dtype=np.complex128)
    for k in range(len(c) - 1, 0, -1):
        b1, b2 = c[k] + x2 * b1 - b2, b1
    return c[0] + x * b1 - b2
