"""Adaptive double-exponential and Filon-type quadrature.

Integrands are vectorised: they receive a 1-D array of abscissae and return
either an array of the same length or a 2-D array ``(n_nodes, n_values)``
when several integrals share the same nodes.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import eval_legendre, spherical_jn

from .errors import QuadratureError

TAU_MAX = 4.0
MIN_LEVEL = 3
MAX_LEVEL = 14


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    level: int
    evaluations: int


@lru_cache(maxsize=None)
def _level_nodes(level):
    """Offsets (distance to the nearest end, in units of the half-width),
    signs and weights for the nodes first introduced at ``level``."""
    h = 2.0 ** -level
    if level == 0:
        k = np.arange(-int(TAU_MAX), int(TAU_MAX) + 1, dtype=float)
    else:
        n = int(TAU_MAX / h)
        k = np.arange(-n + 1, n, 2, dtype=float)
    tau = k * h
    arg = 0.5 * math.pi * np.sinh(tau)
    # 1 - |tanh(arg)| computed without cancellation
    gap = 2.0 / (np.exp(2.0 * np.abs(arg)) + 1.0)
    w = 0.5 * math.pi * np.cosh(tau) / np.cosh(arg) ** 2
    keep = w > 1e-300
    return gap[keep], np.sign(tau)[keep], w[keep]


def _nodes(a, b, level):
    gap, sign, w = _level_nodes(level)
    half = 0.5 * (b - a)
    x = np.where(sign > 0, b - half * gap, a + half * gap)
    x = np.where(sign == 0, 0.5 * (a + b), x)
    return x, w * half


def tanh_sinh(f, a, b, tol=1e-12, min_level=MIN_LEVEL, max_level=MAX_LEVEL, raise_on_fail=True):
    """Integrate ``f`` over the finite interval ``[a, b]``.

    Levels are nested: each one halves the step and adds only the new nodes.
    The reported error is the change between the last two levels and the loop
    stops once it falls below ``tol * max(1, integral of |f|)``.
    """
    if a == b:
        return QuadResult(0.0, 0.0, 0, 0)
    if a > b:
        r = tanh_sinh(f, b, a, tol, min_level, max_level, raise_on_fail)
        return QuadResult(-r.value, r.error, r.level, r.evaluations)
    total = None
    absolute = None
    prev = None
    evals = 0
    for level in range(max_level + 1):
        x, w = _nodes(a, b, level)
        fx = np.asarray(f(x))
        evals += x.size
        part = np.tensordot(w, fx, axes=(0, 0))
        apart = np.tensordot(w, np.abs(fx), axes=(0, 0))
        if total is None:
            total, absolute = part, apart
        else:
            total = 0.5 * total + part * 2.0 ** -level
            absolute = 0.5 * absolute + apart * 2.0 ** -level
        if prev is not None:
            err = float(np.max(np.abs(total - prev)))
            scale = max(1.0, float(np.max(absolute)))
            if level >= min_level and err <= tol * scale:
                return QuadResult(total, err, level, evals)
        prev = total
    if raise_on_fail:
        raise QuadratureError(
            f"tanh-sinh did not reach tol={tol:g} on [{a:g}, {b:g}] (err {err:.3g})",
            estimate=total,
            error=err,
        )
    return QuadResult(total, err, max_level, evals)


# ---------------------------------------------------------------------------
# Filon-type rule for integrals against exp(i omega t)


@lru_cache(maxsize=None)
def _gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    legendre = np.array([eval_legendre(k, x) for k in range(order)])
    return x, w, legendre


def filon_weights(kappa, order):
    """Weights ``w_j`` with ``sum_j w_j p(x_j) = int_{-1}^{1} p(x) e^{i kappa x} dx``
    for every polynomial ``p`` of degree < ``order`` (Gauss-Legendre nodes)."""
    x, gw, leg = _gauss_legendre(order)
    k = np.arange(order)
    moments = 2.0 * (1j ** k) * spherical_jn(k, kappa)
    coef = (2 * k + 1) / 2.0 * moments
    return x, gw * (coef @ leg)


def filon(f, a, b, omega, tol=1e-12, order=12, min_panels=4, max_panels=1 << 14, raise_on_fail=True):
    """``int_a^b f(t) exp(i omega t) dt`` with panel-wise moment fitting.

    ``f`` is smooth and non-oscillatory; the oscillation is carried exactly by
    the moments, so panel count is driven by the variation of ``f`` alone.
    Panels double until two successive sums agree.
    """
    if a == b:
        return QuadResult(0.0, 0.0, 0, 0)
    prev = None
    panels = min_panels
    evals = 0
    while panels <= max_panels:
        h = 0.5 * (b - a) / panels
        centres = a + h * (2 * np.arange(panels) + 1)
        x, w = filon_weights(omega * h, order)
        t = (centres[:, None] + h * x[None, :]).ravel()
        ft = np.asarray(f(t))
        evals += t.size
        ft = ft.reshape((panels, order) + ft.shape[1:])
        phase = np.exp(1j * omega * centres)
        inner = np.tensordot(ft, w, axes=(1, 0)) if ft.ndim == 2 else np.einsum("pj...,j->p...", ft, w)
        total = h * np.tensordot(phase, inner, axes=(0, 0))
        scale = max(1.0, float(np.max(h * np.abs(ft).sum(axis=(0, 1)))))
        if prev is not None:
            err = float(np.max(np.abs(total - prev)))
            if err <= tol * scale:
                return QuadResult(total, err, panels, evals)
        prev = total
        panels *= 2
    if raise_on_fail:
        raise QuadratureError(
            f"Filon rule did not reach tol={tol:g} on [{a:g}, {b:g}]", estimate=prev, error=err
        )
    return QuadResult(prev, err, panels // 2, evals)


def panel_gauss(f, a, b, tol=1e-12, order=16, min_panels=8, max_panels=1 << 13, raise_on_fail=True):
    """Composite Gauss-Legendre rule on ``[a, b]``, doubling the panel count
    until two successive sums agree.  Suited to smooth integrands that
    oscillate many times across a long interval."""
    if a == b:
        return QuadResult(0.0, 0.0, 0, 0)
    x0, w0 = np.polynomial.legendre.leggauss(order)
    prev = None
    panels = min_panels
    evals = 0
    err = math.inf
    while panels <= max_panels:
        h = 0.5 * (b - a) / panels
        centres = a + h * (2 * np.arange(panels) + 1)
        t = (centres[:, None] + h * x0[None, :]).ravel()
        ft = np.asarray(f(t))
        evals += t.size
        w = np.tile(w0, panels) * h
        total = np.tensordot(w, ft, axes=(0, 0))
        scale = max(1.0, float(np.max(np.tensordot(w, np.abs(ft), axes=(0, 0)))))
        if prev is not None:
            err = float(np.max(np.abs(total - prev)))
            if err <= tol * scale:
                return QuadResult(total, err, panels, evals)
        prev = total
        panels *= 2
    if raise_on_fail:
        raise QuadratureError(f"panel Gauss rule did not reach tol={tol:g} on [{a:g}, {b:g}]", estimate=prev, error=err)
    return QuadResult(prev, err, panels // 2, evals)


@dataclass(frozen=True)
class TailEstimate:
    cutoff: float
    tail: float
    scanned_to: float
    total: float


def march_tail(abs_fn, start, tol, limit, step=0.5, block=32.0, noise=None):
    """Estimate ``int_R^inf |f|`` by sampling ``abs_fn`` outward in blocks.

    The march stops after the first block ``[R, R + block)`` for which the
    following two block maxima either decrease with a geometric continuation
    below ``tol``, or both lie at the rounding-noise level ``noise`` (by
    default judged from the first block).
    ``cutoff`` is that ``R``; ``tail`` bounds the integral beyond it, assuming
    the sampled running maximum envelope keeps decreasing, and ``total``
    bounds the integral from ``start`` (block maxima times block length).
    """
    maxima = []
    lo = start
    while lo < limit:
        t = np.arange(lo, lo + block, step)
        maxima.append(float(np.max(abs_fn(t))))
        lo += block
        if len(maxima) >= 3:
            m2, m1, m0 = maxima[-3:]
            ratio = m0 / m1 if m1 > 0 else 0.0
            if m1 <= m2 and ratio < 1.0:
                tail = block * (m1 + m0 / (1.0 - ratio))
                if tail <= tol:
                    return TailEstimate(lo - 2 * block, tail, lo, block * sum(maxima[:-2]) + tail)
            level = 1e3 * np.finfo(float).eps * maxima[0] if noise is None else noise
            floor = max(tol / (10.0 * block), level)
            if max(m1, m0) <= floor:
                return TailEstimate(lo - 2 * block, block * (m1 + m0), lo, block * sum(maxima))
    return TailEstimate(limit, math.inf, limit, math.inf)
