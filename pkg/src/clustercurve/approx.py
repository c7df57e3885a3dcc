"""Single-polynomial stand-in for the entire approximant.

A polynomial is entire, so on a finite window [-T, T] it can play the role
of an entire function f with |f - sigma| < eps(t) and |f' - sigma'| < eps(t).
The polynomial is stored as a Chebyshev series in x = t / T and fitted by
discrete least squares on Chebyshev-Gauss nodes, which reduces to a DCT.
The derivative is fitted and then integrated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import fft

from . import kernels
from .curve import DomainError

OVERSAMPLING = 4
TRIM_RTOL = 1e-14


class FitError(RuntimeError):
    """No degree up to the cap met the schedule; ``best`` holds the closest fit."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


class MarkerCertificationError(RuntimeError):
    def __init__(self, message, approximant, report, schedule):
        super().__init__(message)
        self.approximant = approximant
        self.report = report
        self.schedule = schedule


@dataclass(frozen=True)
class ErrorSchedule:
    """eps(t) = base(t) times continuous dips around tightened centres.

    The default base is min(1, 1/(1+t^2)); a dip scales eps by ``factor`` on
    |t - c| <= 1 and returns linearly to 1 at |t - c| = 2.
    """

    kind: str = "default"
    value: float = 1.0
    dips: tuple = field(default=())

    def base(self, ts):
        ts = np.asarray(ts, dtype=np.float64)
        if self.kind == "default":
            return np.minimum(1.0, 1.0 / (1.0 + ts * ts))
        if self.kind == "uniform":
            return np.full(ts.shape, self.value)
        if self.kind == "harmonic":
            return self.value / (1.0 + np.abs(ts))
        raise ValueError(f"unknown schedule kind {self.kind!r}")

    def __call__(self, ts):
        ts = np.asarray(ts, dtype=np.float64)
        out = self.base(ts)
        for c, factor in self.dips:
            r = np.clip(np.abs(ts - c) - 1.0, 0.0, 1.0)
            out = out * (factor + (1.0 - factor) * r)
        return out

    def tightened(self, centres, factor=0.25):
        return ErrorSchedule(self.kind, self.value, self.dips + tuple((float(c), factor) for c in centres))

    def to_json(self):
        return {"kind": self.kind, "value": self.value, "dips": [list(d) for d in self.dips]}


@dataclass(frozen=True)
class PolynomialApproximant:
    T: float
    coeffs: np.ndarray
    cert_value_err: float
    cert_deriv_err: float

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        dc = C.chebder(c) / self.T if len(c) > 1 else np.zeros(1, dtype=np.complex128)
        dc = np.array(dc, dtype=np.complex128)
        dc.setflags(write=False)
        object.__setattr__(self, "_dcoeffs", dc)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def domain(self):
        return (-self.T, self.T)

    @property
    def certified(self):
        return self.cert_value_err < 1.0 and self.cert_deriv_err < 1.0

    def evaluate(self, ts):
        ts = np.asarray(ts, dtype=np.float64)
        if ts.size and (not np.all(np.isfinite(ts)) or np.max(np.abs(ts)) > self.T):
            raise DomainError(f"polynomial surrogate is only defined on [-{self.T}, {self.T}]")
        x = np.clip(ts / self.T, -1.0, 1.0)
        return kernels.chebval(self.coeffs, x), kernels.chebval(self._dcoeffs, x)

    def evaluate_complex(self, zs):
        """Values and derivatives at complex parameters (numpy Clenshaw)."""
        x = np.asarray(zs, dtype=np.complex128) / self.T
        return C.chebval(x, self.coeffs), C.chebval(x, self._dcoeffs)

    def __call__(self, t):
        v, d = self.evaluate(np.array([t]))
        return complex(v[0]), complex(d[0])

    def to_json(self):
        return {
            "T": self.T,
            "degree": self.degree,
            "basis": "chebyshev",
            "coeff_re": self.coeffs.real.tolist(),
            "coeff_im": self.coeffs.imag.tolist(),
            "cert_value_err": self.cert_value_err,
            "cert_deriv_err": self.cert_deriv_err,
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        c = np.array(obj["coeff_re"]) + 1j * np.array(obj["coeff_im"])
        return cls(float(obj["T"]), c, float(obj["cert_value_err"]), float(obj["cert_deriv_err"]))


def eval_poly(f, t):
    return f(t)


def gauss_nodes(m):
    """Chebyshev points of the first kind, in decreasing order."""
    return np.cos(np.pi * (np.arange(m) + 0.5) / m)


def lobatto_nodes(m):
    """cos(pi k / m), k = 0..m; interleaves the m first-kind nodes."""
    return np.cos(np.pi * np.arange(m + 1) / m)


def chebyshev_fit(samples, degree):
    """Least-squares Chebyshev coefficients from samples on ``gauss_nodes(len(samples))``."""
    samples = np.asarray(samples)
    m = len(samples)
    if degree >= m:
        raise ValueError("degree must be below the number of samples")

    def _dct(y):
        c = fft.dct(y, type=2) / m
        c[0] /= 2
        return c

    c = _dct(samples.real) + 1j * _dct(samples.imag)
    return c[: degree + 1]


def _trim(c):
    scale = np.max(np.abs(c)) if len(c) else 0.0
    keep = len(c)
    while keep > 1 and abs(c[keep - 1]) <= TRIM_RTOL * scale:
        keep -= 1
    return c[:keep]


def _check_window(curve, T):
    lo, hi = getattr(curve, "domain", (-math.inf, math.inf))
    if -T < lo or T > hi:
        raise DomainError(f"window [-{T}, {T}] is not inside the curve domain [{lo}, {hi}]")


def _fit_degree(curve, T, schedule, degree):
    """Fit f' by least squares, integrate, and pick the constant from the values.

    Fitting the derivative directly and integrating keeps the derivative
    error at the least-squares level instead of amplifying the value error.
    """
    m = OVERSAMPLING * (degree + 1)
    x = gauss_nodes(m)
    vals, ders = curve.evaluate(T * x)
    dc = chebyshev_fit(ders * T, degree - 1)
    coeffs = np.array(C.chebint(dc), dtype=np.complex128)
    w = 1.0 / schedule(T * x) ** 2
    coeffs[0] += np.sum(w * (vals - C.chebval(x, coeffs))) / np.sum(w)
    coeffs = _trim(coeffs)
    ev, ed = verify(PolynomialApproximant(T, coeffs, math.inf, math.inf), curve, schedule, m)
    return PolynomialApproximant(T, coeffs, ev, ed)


def chebval_lobatto(c, m):
    """Series values at cos(pi k / m), k = 0..m, by one DCT-I (needs len(c) <= m + 1)."""
    c = np.asarray(c, dtype=np.complex128)
    if len(c) > m + 1:
        raise ValueError("too many coefficients for the grid")
    x = np.zeros(m + 1, dtype=np.complex128)
    x[: len(c)] = c
    x[0] *= 2
    x[m] *= 2

    def _dct1(y):
        return fft.dct(y, type=1) / 2

    return _dct1(x.real) + 1j * _dct1(x.imag)


def verify(f, curve, schedule, m):
    """Max weighted value and derivative errors on the m+1 Lobatto points of [-T, T]."""
    T = f.T
    tv = T * lobatto_nodes(m)
    tv[0], tv[-1] = T, -T
    sv, sd = curve.evaluate(tv)
    fv, fd = chebval_lobatto(f.coeffs, m), chebval_lobatto(f._dcoeffs, m)
    eps = schedule(tv)
    return float(np.max(np.abs(fv - sv) / eps)), float(np.max(np.abs(fd - sd) / eps))


def reverify(f, curve, schedule=None, factor=10):
    """Weighted errors on a grid ``factor`` times finer than the certification grid.

    Lobatto points for an odd count never hit the first-kind fitting nodes.
    """
    schedule = schedule or ErrorSchedule()
    m = OVERSAMPLING * (f.degree + 1)
    return verify(f, curve, schedule, factor * m + 1)


def degree_ladder(max_degree, start=8):
    d = start
    while d < max_degree:
        yield d
        d *= 2
    yield max_degree


def fit(curve, T, schedule=None, max_degree=4096):
    """Lowest degree on the ladder 8, 16, 32, ... meeting the weighted schedule.

    Errors are certified on Chebyshev-Lobatto points, which never coincide
    with the Gauss nodes used for fitting, and confirmed on a 10x finer grid.
    """
    schedule = schedule or ErrorSchedule()
    if max_degree < 8:
        raise ValueError("max_degree must be >= 8")
    _check_window(curve, T)
    best = None
    for degree in degree_ladder(max_degree):
        f = _fit_degree(curve, T, schedule, degree)
        if f.certified:
            # the coarse grid can miss peaks between its points; accept only
            # if a 10x finer disjoint grid agrees, and record the worse errors
            ev, ed = reverify(f, curve, schedule)
            f = PolynomialApproximant(T, f.coeffs, max(ev, f.cert_value_err), max(ed, f.cert_deriv_err))
            if f.certified:
                return f
        if best is None or max(f.cert_value_err, f.cert_deriv_err) < max(best.cert_value_err, best.cert_deriv_err):
            best = f
    raise FitError(
        f"degree {max_degree} reached without meeting the schedule "
        f"(weighted errors: value {best.cert_value_err:.3g}, derivative {best.cert_deriv_err:.3g})",
        best,
    )


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    a = np.asarray(a, dtype=np.float64)
    w = np.mod(a + np.pi, 2 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


@dataclass
class MarkerCheck:
    s: float
    kind: str
    side: str
    expected: float
    angle: float
    error: float
    ok: bool


@dataclass
class MarkerReport:
    tol: float
    checks: list

    @property
    def failures(self):
        return [c for c in self.checks if not c.ok]

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {
            "tol": self.tol,
            "passed": self.passed,
            "checked": len(self.checks),
            "failures": [
                {"s": c.s, "kind": c.kind, "side": c.side, "angle": c.angle, "error": c.error}
                for c in self.failures
            ],
            "max_error": max((c.error for c in self.checks), default=0.0),
        }


def markers_in_window(markers, T, margin=1.0):
    return [m for m in markers if -T + margin <= m.s <= T - margin]


def marker_angle_certify(f, markers, tol):
    """Compare arg f'(s) with the expected 0 or pi/2 at each marker inside [-T+1, T-1]."""
    inside = markers_in_window(markers, f.T)
    if not inside:
        return MarkerReport(tol, [])
    s = np.array([m.s for m in inside])
    _, d = f.evaluate(s)
    ang = np.angle(d)
    checks = []
    for m, a in zip(inside, ang):
        err = float(abs(wrap_angle(a - m.expected_angle)))
        checks.append(MarkerCheck(m.s, m.kind, m.side, m.expected_angle, float(a), err, err <= tol))
    return MarkerReport(tol, checks)


@dataclass
class Certification:
    approximant: PolynomialApproximant
    fit_ok: bool
    report: MarkerReport
    schedule: ErrorSchedule
    rounds: int

    @property
    def passed(self):
        return self.fit_ok and self.report.passed


def _fit_or_best(curve, T, schedule, max_degree):
    try:
        return fit(curve, T, schedule, max_degree), True
    except FitError as e:
        return e.best, False


def certify(curve, markers, T, schedule=None, max_degree=4096, tol=0.2, rounds=3):
    """Fit, check marker angles, tighten eps near failing markers and refit, up to ``rounds`` times.

    Never raises on failure: the last approximant (or the best one when the
    schedule was not met) is returned together with the outcome.
    """
    schedule = schedule or ErrorSchedule()
    f, ok = _fit_or_best(curve, T, schedule, max_degree)
    report = marker_angle_certify(f, markers, tol)
    done = 0
    while done < rounds and not (ok and report.passed):
        if report.passed:
            break  # the schedule itself is out of reach; tightening cannot help
        schedule = schedule.tightened([c.s for c in report.failures])
        f, ok = _fit_or_best(curve, T, schedule, max_degree)
        report = marker_angle_certify(f, markers, tol)
        done += 1
    return Certification(f, ok, report, schedule, done)


def certify_markers(curve, markers, T, schedule=None, max_degree=4096, tol=0.2, rounds=3):
    """Strict form of ``certify``: returns (f, report, schedule) or raises."""
    res = certify(curve, markers, T, schedule, max_degree, tol, rounds)
    if not res.fit_ok:
        raise FitError("schedule not met", res.approximant)
    if not res.report.passed:
        raise MarkerCertificationError(
            f"{len(res.report.failures)} marker angles still off by more than {tol} after {rounds} rounds",
            res.approximant, res.report, res.schedule,
        )
    return res.approximant, res.report, res.schedule
