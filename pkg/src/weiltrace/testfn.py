"""Smooth compactly supported test functions on the positive reals.

A :class:`TestFunction` carries a vectorised ``evaluate`` and its support
``[support_lo, support_hi]``.  Mellin transforms are computed in the
logarithmic variable ``u = log x`` where the built-in functions are smooth
and flat at both ends of their support.
"""
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import ParameterError
from .quadrature import tanh_sinh

DEFAULT_TOL = 1e-12
GRID_NODES = 4096
SPLINE_DEGREE = 5


@dataclass(frozen=True)
class TestFunction:
    evaluate: Callable = field(repr=False)
    support_lo: float
    support_hi: float
    smooth: bool = True
    label: str = ""

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if not self.support_lo > 0:
            raise ParameterError("support_lo must be positive")
        if self.support_hi < self.support_lo:
            raise ParameterError("support_hi must be >= support_lo")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.support_lo) & (x < self.support_hi)
        out = np.zeros(x.shape, dtype=np.result_type(float, self._dtype))
        if inside.any():
            out[inside] = self.evaluate(x[inside])
        return out if out.ndim else out[()]

    @property
    def _dtype(self):
        return np.asarray(self.evaluate(np.array([math.sqrt(self.support_lo * self.support_hi)]))).dtype

    @property
    def log_support(self):
        return math.log(self.support_lo), math.log(self.support_hi)

    def scaled(self, factor):
        ev = self.evaluate
        return TestFunction(lambda x: factor * ev(x), self.support_lo, self.support_hi, self.smooth,
                            f"{factor:g}*{self.label}")


@dataclass(frozen=True)
class MellinValue:
    s: complex
    value: complex
    quadrature_error_estimate: float


def bump(log_radius, log_center=0.0):
    """``exp(-1/(1-u^2))`` with ``u = (log x - log_center) / log_radius``."""
    if not log_radius > 0:
        raise ParameterError(f"log_radius must be positive, got {log_radius}")
    r, c = float(log_radius), float(log_center)

    def evaluate(x):
        u = (np.log(x) - c) / r
        # (1-u)(1+u) avoids cancellation near the support edges
        d = (1.0 - u) * (1.0 + u)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.where(d > 0, np.exp(-1.0 / np.where(d > 0, d, 1.0)), 0.0)

    return TestFunction(evaluate, math.exp(c - r), math.exp(c + r), True, f"bump(logr={r:.17g},center={c:.17g})")


def involution(g):
    """``g*(x) = g(1/x) / x``; Mellin transform ``s -> g^(1 - s)``."""
    ev = g.evaluate
    return TestFunction(lambda x: ev(1.0 / x) / x, 1.0 / g.support_hi, 1.0 / g.support_lo, g.smooth, f"inv({g.label})")


def inversion(g):
    """``x -> g(1/x)``; Mellin transform ``s -> g^(-s)``."""
    ev = g.evaluate
    return TestFunction(lambda x: ev(1.0 / x), 1.0 / g.support_hi, 1.0 / g.support_lo, g.smooth, f"flip({g.label})")


def add(f, g, label=None):
    lo, hi = min(f.support_lo, g.support_lo), max(f.support_hi, g.support_hi)
    return TestFunction(lambda x: f(x) + g(x), lo, hi, f.smooth and g.smooth, label or f"{f.label}+{g.label}")


MELLIN_CHUNK = 256


def mellin_many(g, s, tol=DEFAULT_TOL):
    """Mellin transform at every point of ``s``; returns ``(values, error)``.

    Points are processed in chunks of similar height so that the node count
    adapts to the oscillation of each chunk.
    """
    s = np.asarray(s, dtype=np.complex128)
    flat = s.ravel()
    a, b = g.log_support
    out = np.empty(flat.shape, dtype=np.complex128)
    err = 0.0
    order = np.argsort(np.abs(flat.imag), kind="stable")
    for lo in range(0, flat.size, MELLIN_CHUNK):
        idx = order[lo:lo + MELLIN_CHUNK]
        chunk = flat[idx]

        def integrand(u, chunk=chunk):
            return g.evaluate(np.exp(u))[:, None] * np.exp(np.multiply.outer(u, chunk))

        r = tanh_sinh(integrand, a, b, tol=tol, max_level=16)
        out[idx] = r.value
        err = max(err, r.error)
    return out.reshape(s.shape), err


def abs_mellin_scale(g, sigma=0.5):
    """``int |g(x)| x^{sigma - 1} dx``, the size against which rounding noise
    in Mellin values on the line ``Re s = sigma`` is measured."""
    a, b = g.log_support
    # |g| has kinks where g changes sign; a few digits suffice for a scale
    r = tanh_sinh(lambda u: np.abs(g.evaluate(np.exp(u))) * np.exp(sigma * u), a, b, tol=1e-6,
                  max_level=10, raise_on_fail=False)
    return float(r.value)


def mellin(g, s, tol=DEFAULT_TOL):
    """``g^(s) = int_0^inf g(x) x^{s-1} dx`` by tanh-sinh in ``log x``."""
    vals, err = mellin_many(g, [s], tol)
    return MellinValue(complex(s), complex(vals[0]), err)


def _grid_function(v, values, label, lo, hi):
    spline = make_interp_spline(v, values, k=SPLINE_DEGREE)
    vlo, vhi = v[0], v[-1]

    def evaluate(x):
        w = np.log(x)
        out = spline(np.clip(w, vlo, vhi))
        return np.where((w > vlo) & (w < vhi), out, 0.0)

    return TestFunction(evaluate, lo, hi, True, label)


def mult_convolve(g0, nodes=GRID_NODES, tol=DEFAULT_TOL):
    """``g(x) = int_0^inf g0(xy) conj(g0(y)) dy``, so that ``g^(s) = g0^(s) conj(g0^(1 - conj s))``.

    Values are computed by quadrature on a log-uniform grid of ``nodes``
    intervals and interpolated with a degree-5 spline in ``log x``.
    """
    a, b = g0.log_support
    span = b - a
    v = np.linspace(-span, span, nodes + 1)
    lo = np.maximum(a, a - v)
    hi = np.minimum(b, b - v)
    half = 0.5 * (hi - lo)

    def integrand(tau):
        w = lo[None, :] + half[None, :] * (tau[:, None] + 1.0)
        f = g0(np.exp(w + v[None, :])) * np.conj(g0(np.exp(w))) * np.exp(w)
        return f * half[None, :]

    vals = np.asarray(tanh_sinh(integrand, -1.0, 1.0, tol=tol).value)
    vals[0] = vals[-1] = 0.0
    if np.iscomplexobj(vals) and np.all(vals.imag == 0):
        vals = vals.real
    return _grid_function(v, vals, f"conv({g0.label})", math.exp(-span), math.exp(span))


def haar_convolve(g0, nodes=GRID_NODES, tol=DEFAULT_TOL):
    """``g(x) = int_0^inf g0(xy) conj(g0(y)) dy/y``, so that ``g^(s) = g0^(s) conj(g0^(-conj s))``.

    On the imaginary axis this is ``|g0^(ir)|^2``, and ``g(1/x) = conj g(x)``.
    """
    a, b = g0.log_support
    span = b - a
    v = np.linspace(-span, span, nodes + 1)
    lo = np.maximum(a, a - v)
    hi = np.minimum(b, b - v)
    half = 0.5 * (hi - lo)

    def integrand(tau):
        w = lo[None, :] + half[None, :] * (tau[:, None] + 1.0)
        f = g0(np.exp(w + v[None, :])) * np.conj(g0(np.exp(w)))
        return f * half[None, :]

    vals = np.asarray(tanh_sinh(integrand, -1.0, 1.0, tol=tol).value)
    vals[0] = vals[-1] = 0.0
    if np.iscomplexobj(vals) and np.all(vals.imag == 0):
        vals = vals.real
    return _grid_function(v, vals, f"haar({g0.label})", math.exp(-span), math.exp(span))


def additive_half_length(g):
    """Half-length ``t`` of the additive support ``[-t, t]`` (for symmetric supports ``log support_hi``)."""
    a, b = g.log_support
    return 0.5 * (b - a)
