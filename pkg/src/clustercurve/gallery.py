"""Explicit curves with prescribed ends and the strip transfer to a locally conformal map."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .approx import PolynomialApproximant
from .curve import DomainError
from .sphere import INF


class SlitError(ValueError):
    pass


@dataclass(frozen=True)
class NamedCurve:
    name: str
    value: object
    derivative: object
    initial: object
    terminal: object
    domain: tuple = (-math.inf, math.inf)

    def evaluate(self, ts):
        ts = np.asarray(ts, dtype=np.float64)
        return (np.asarray(self.value(ts), dtype=np.complex128),
                np.asarray(self.derivative(ts), dtype=np.complex128))

    def __call__(self, t):
        v, d = self.evaluate(np.array([t], dtype=np.float64))
        return complex(v[0]), complex(d[0])


def psi(s):
    """s * exp(1/(1 - s^2)) on (-1, 1)."""
    s = np.asarray(s, dtype=np.float64)
    if np.any(np.abs(s) >= 1):
        raise DomainError("psi is defined on (-1, 1)")
    return s * np.exp(1.0 / (1.0 - s * s))


def psi_prime(s):
    s = np.asarray(s, dtype=np.float64)
    x = 1.0 - s * s
    return np.exp(1.0 / x) * (1.0 + 2.0 * s * s / (x * x))


def _psi_inverse_scalar(x):
    if x == 0:
        return 0.0
    sign = 1.0 if x > 0 else -1.0
    lx = math.log(abs(x))

    # with y = log s, psi(s) = x becomes g(y) = 0 and g is increasing on (-inf, 0)
    def g(y):
        return y + 1.0 / (1.0 - math.exp(2 * y)) - lx

    def dg(y):
        e = math.exp(2 * y)
        return 1.0 + 2.0 * e / (1.0 - e) ** 2

    lo, hi = min(lx - 2.0, -1.0), 0.0
    while hi - lo > 1e-15 * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    y = lo if hi == 0.0 else 0.5 * (lo + hi)
    for _ in range(3):
        nxt = y - g(y) / dg(y)
        if not (nxt < 0 and math.isfinite(nxt)):
            break
        y = nxt
    return sign * math.exp(y)


def psi_inverse(x):
    """Inverse of psi on the whole real line, by bisection in log space plus Newton polish."""
    arr = np.asarray(x, dtype=np.float64)
    out = np.array([_psi_inverse_scalar(float(v)) for v in arr.ravel()]).reshape(arr.shape)
    return out if arr.ndim else float(out)


def _ex1():
    def value(t):
        return np.exp(-t * t + 1j * t)

    def derivative(t):
        return (-2 * t + 1j) * np.exp(-t * t + 1j * t)

    return NamedCurve("example1", value, derivative, 0j, 0j)


def _ex2_parts(eta):
    u = eta * eta - 1.0
    with np.errstate(over="ignore"):
        E = np.exp(-1.0 / u)
    return u, E


def example2_in_eta(eta):
    """The Example 2 curve as a function of eta in (-1, 1): values and d/d(eta).

    exp(1/(1 - eta^2)) overflows for |eta| above about 0.9993; psi maps every
    finite t strictly inside that range, so the curve in t is unaffected.
    """
    eta = np.asarray(eta, dtype=np.float64)
    u, E = _ex2_parts(eta)
    v = eta + 1j * u * np.sin(E)
    d = 1.0 + 1j * (2 * eta * np.sin(E) + 2 * eta * E * np.cos(E) / u)
    return v, d


def example2_envelope(eta):
    """|gamma - end| <= (1 - |eta|) + (1 - eta^2), valid for any value of the sine."""
    a = np.abs(np.asarray(eta, dtype=np.float64))
    return (1 - a) + (1 - a * a)


def _ex2():
    def value(t):
        return example2_in_eta(psi_inverse(t))[0]

    def derivative(t):
        eta = psi_inverse(t)
        return example2_in_eta(eta)[1] / psi_prime(eta)

    return NamedCurve("example2", value, derivative, complex(-1), complex(1))


def _ex3():
    def value(t):
        return np.exp((1 + 1j) * t)

    def derivative(t):
        return (1 + 1j) * np.exp((1 + 1j) * t)

    return NamedCurve("example3", value, derivative, 0j, INF)


def _ex4():
    def value(t):
        return np.exp(t * t + 1j * t)

    def derivative(t):
        return (2 * t + 1j) * np.exp(t * t + 1j * t)

    return NamedCurve("example4", value, derivative, INF, INF)


_EXAMPLES = {1: _ex1, 2: _ex2, 3: _ex3, 4: _ex4}


def example_curve(which):
    try:
        return _EXAMPLES[int(which)]()
    except (KeyError, ValueError, TypeError):
        raise ValueError(f"unknown example {which!r}; choose 1, 2, 3 or 4") from None


def example4_arg_growth(a, b):
    """Closed-form increase of arg gamma' for Example 4 over [a, b] (continuous branch)."""
    return (b + math.atan2(1, 2 * b)) - (a + math.atan2(1, 2 * a))


def on_slit(z):
    z = np.asarray(z, dtype=np.complex128)
    return (z.real == 0) & (np.abs(z.imag) >= 1)


@dataclass(frozen=True)
class StripMap:
    """h(z) = (2c/pi) arcsinh z from the plane minus [i, i inf) and [-i, -i inf) onto |Im w| < c."""

    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("half-width must be positive")

    @property
    def scale(self):
        return 2.0 * self.c / math.pi

    def forward(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if np.any(on_slit(z)):
            raise SlitError("point lies on a slit [i, i inf) or [-i, -i inf)")
        return self.scale * np.arcsinh(z)

    def inverse(self, w):
        w = np.asarray(w, dtype=np.complex128)
        if np.any(np.abs(w.imag) >= self.c):
            raise DomainError("point is outside the open strip")
        return np.sinh(w / self.scale)

    def derivative(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return self.scale / np.sqrt(1.0 + z * z)


def strip_map(c, z):
    w = StripMap(c).forward(np.asarray(z))
    return complex(w) if np.ndim(w) == 0 else w


def transfer(f: PolynomialApproximant, c, u):
    """g(u) = f(h(u)) and g'(u) = f'(h(u)) h'(u) for real u."""
    h = StripMap(c)
    u = np.asarray(u, dtype=np.float64)
    t = h.forward(u).real
    if np.any(np.abs(t) > f.T):
        raise DomainError(f"h(u) leaves the approximant window [-{f.T}, {f.T}]")
    v, d = f.evaluate(np.atleast_1d(t))
    hp = h.derivative(np.atleast_1d(u)).real
    g, gp = v, d * hp
    if u.ndim == 0:
        return complex(g[0]), complex(gp[0])
    return g, gp


def strip_half_width(f: PolynomialApproximant, steps=8, nu=801, nv=9):
    """Largest c = 2^-k (k < steps) for which a sampled rectangle [-T, T] x [-c, c]
    keeps f' away from 0 and |f(u+iv) - f(u)| < 1/(1+|u|)."""
    u = np.linspace(-f.T, f.T, nu)
    fu, _ = f.evaluate(u)
    for k in range(steps):
        c = 2.0 ** -k
        ok = True
        for v in np.linspace(-c, c, nv):
            val, der = f.evaluate_complex(u + 1j * v)
            if np.any(np.abs(der) == 0) or np.any(np.abs(val - fu) >= 1.0 / (1.0 + np.abs(u))):
                ok = False
                break
        if ok:
            return c
    raise ValueError("no dyadic half-width found")
