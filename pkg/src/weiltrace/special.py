"""Complex special functions built on the compiled kernels.

Conventions worth stating once:

* ``completed_zeta(s) = pi^{-s/2} Gamma(s/2) zeta(s)`` with no ``s(s-1)/2``
  factor, so it has simple poles at 0 and 1 and satisfies
  ``completed_zeta(s) == completed_zeta(1 - s)``.
* ``m_scalar(s) = completed_zeta(s) / completed_zeta(1 + s)``; its logarithmic
  derivative is regular on the whole imaginary axis, including ``s = 0``.

All functions accept scalars or numpy arrays and return the same shape.
"""
import math
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, NearZeroError, ParameterError, PoleError
from .quadrature import tanh_sinh

EULER_GAMMA = 0.57721566490153286061
LOG_PI = math.log(math.pi)
SQRT_PI = math.sqrt(math.pi)
ZERO_GUARD = 1e-8


@dataclass(frozen=True)
class PrecisionConfig:
    euler_maclaurin_terms: int = _kernels.EM_TERMS
    stirling_cutoff: float = _kernels.STIRLING_RADIUS
    target_abs_error: float = 1e-12

    def __post_init__(self):
        if not self.target_abs_error > 0:
            raise ParameterError("target_abs_error must be positive")


def default_precision():
    """Defaults, with ``APP_PRECISION`` overriding the target error."""
    env = os.environ.get("APP_PRECISION")
    if env:
        return PrecisionConfig(target_abs_error=float(env))
    return PrecisionConfig()


def _apply(kernel, s):
    arr = np.asarray(s, dtype=np.complex128)
    out = kernel(arr.ravel())
    if isinstance(out, tuple):
        out = tuple(o.reshape(arr.shape) for o in out)
        return out if arr.ndim else tuple(complex(o) for o in out)
    out = out.reshape(arr.shape)
    return out if arr.ndim else complex(out)


def _check_gamma_poles(s):
    z = np.asarray(s, dtype=np.complex128)
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleError(f"Gamma has a pole at {z[bad].ravel()[0]}")


def log_gamma(s):
    """Principal branch of log Gamma (continuous off the negative real axis)."""
    _check_gamma_poles(s)
    return _apply(_kernels.loggamma, s)


def digamma(s):
    _check_gamma_poles(s)
    return _apply(_kernels.digamma, s)


def _check_one(s):
    z = np.asarray(s, dtype=np.complex128)
    if np.any(z == 1.0):
        raise PoleError("zeta has a pole at s = 1")


def hurwitz_zeta(s, a=1.0):
    if not 0.0 < a <= 1.0:
        raise ParameterError(f"Hurwitz parameter a must lie in (0, 1], got {a}")
    _check_one(s)
    return _apply(lambda x: _kernels.hurwitz(x, a)[0], s)


def hurwitz_zeta_and_deriv(s, a=1.0):
    """``(zeta(s, a), d/ds zeta(s, a))`` from one Euler-Maclaurin pass."""
    if not 0.0 < a <= 1.0:
        raise ParameterError(f"Hurwitz parameter a must lie in (0, 1], got {a}")
    _check_one(s)
    return _apply(lambda x: _kernels.hurwitz(x, a), s)


def _reflected(s):
    """``(zeta(s), zeta'(s))`` for ``Re s < 0`` from
    ``zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)``; the direct
    Euler-Maclaurin sum loses digits there to cancellation."""
    w = 1.0 - s
    lg = _kernels.loggamma(w)
    zv, zd = _kernels.hurwitz(w, 1.0)
    half = 0.5 * np.pi * s
    factor = np.exp(s * math.log(2.0) + (s - 1.0) * LOG_PI + lg) * np.sin(half)
    val = factor * zv
    # d/ds log factor = log 2 pi + (pi/2) cot(pi s/2) - psi(1-s); d/ds zeta(1-s) = -zeta'(1-s)
    dlog = math.log(2.0 * math.pi) + 0.5 * np.pi * np.cos(half) / np.sin(half) - _kernels.digamma(w)
    der = factor * (dlog * zv - zd)
    return val, der


def _zeta_pair(s):
    arr = np.asarray(s, dtype=np.complex128)
    _check_one(arr)
    flat = arr.ravel()
    val, der = _kernels.hurwitz(flat, 1.0)
    left = (flat.real < 0) & ~((flat.imag == 0) & (flat.real == np.round(flat.real)) & (flat.real % 2 == 0))
    if np.any(left):
        val[left], der[left] = _reflected(flat[left])
    val, der = val.reshape(arr.shape), der.reshape(arr.shape)
    return (val, der) if arr.ndim else (complex(val), complex(der))


def zeta(s):
    """Riemann zeta; the reflection formula is used for ``Re s < 0``."""
    return _zeta_pair(s)[0]


def zeta_logderiv(s):
    val, der = _zeta_pair(s)
    if np.any(np.abs(val) < ZERO_GUARD):
        raise NearZeroError("zeta(s) is too close to zero for its logarithmic derivative")
    return der / val


def shifted_zeta(s):
    """``(s zeta(1+s), d/ds[s zeta(1+s)])``; entire, equal to ``(1, gamma)`` at 0."""
    return _apply(_kernels.eta_one, s)


def completed_zeta(s):
    z = np.asarray(s, dtype=np.complex128)
    if np.any((z == 0) | (z == 1)):
        raise PoleError("completed zeta has poles at s = 0 and s = 1")
    _check_gamma_poles(0.5 * z)
    lg = _apply(_kernels.loggamma, 0.5 * z)
    return np.exp(lg - 0.5 * z * LOG_PI) * zeta(z) if z.ndim else complex(
        np.exp(lg - 0.5 * z * LOG_PI) * zeta(complex(z))
    )


def _m_pieces(s):
    # m(s) = 2 sqrt(pi) Gamma(1 + s/2) zeta(s) / (Gamma((1+s)/2) * s zeta(1+s))
    z = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    lg_a = _kernels.loggamma(1.0 + 0.5 * z)
    lg_b = _kernels.loggamma(0.5 * (1.0 + z))
    zv, zd = _kernels.hurwitz(z, 1.0)
    ev, ed = _kernels.eta_one(z)
    return z, lg_a, lg_b, zv, zd, ev, ed


def m_scalar(s):
    """Scattering scalar ``xi(s) / xi(1 + s)``; |m| = 1 on the imaginary axis."""
    arr = np.asarray(s, dtype=np.complex128)
    if np.any(arr == 0):
        raise PoleError("m(s) is a ratio of two poles at s = 0 (limit -1)")
    if np.any(arr == -1) or np.any(arr == 1):
        raise PoleError("m(s) has a pole or zero at s = -1 / s = 1")
    z, lg_a, lg_b, zv, zd, ev, ed = _m_pieces(arr)
    out = 2.0 * SQRT_PI * np.exp(lg_a - lg_b) * zv / ev
    return out.reshape(arr.shape) if arr.ndim else complex(out[0])


def m_logderiv(s):
    """``m'/m(s) = psi(s/2)/2 - psi((1+s)/2)/2 + zeta'/zeta(s) - zeta'/zeta(1+s)``.

    The two 1/s singularities cancel; each is absorbed into a regular piece
    (``psi(s/2) = psi(1+s/2) - 2/s`` and ``s zeta(1+s)``), so ``s = 0`` returns
    the finite limit.
    """
    arr = np.asarray(s, dtype=np.complex128)
    z, _, _, zv, zd, ev, ed = _m_pieces(arr)
    if np.any(np.abs(zv) < ZERO_GUARD) or np.any(np.abs(ev) < ZERO_GUARD * np.abs(z)):
        raise NearZeroError("m'/m requested within 1e-8 of a zero of zeta(s) or zeta(1+s)")
    psi_a = _kernels.digamma(1.0 + 0.5 * z)
    psi_b = _kernels.digamma(0.5 * (1.0 + z))
    out = 0.5 * psi_a - 0.5 * psi_b + zd / zv - ed / ev
    return out.reshape(arr.shape) if arr.ndim else complex(out[0])


# ---------------------------------------------------------------------------
# Gauss-Weil principal value


@dataclass(frozen=True)
class PvIntegrandPair:
    """``f0(x) = min(sqrt x, 1/sqrt x)`` and ``f1 = 1/f0 - f0``.

    ``c`` is the coefficient for which ``f - c / f1`` is integrable against
    ``dx/x`` when ``f = f0^{2s-1} / f1``; it equals 1 for every ``s``.
    """

    c: float = 1.0

    @staticmethod
    def f0(x):
        return np.minimum(np.sqrt(x), 1.0 / np.sqrt(x))

    @classmethod
    def f1(cls, x):
        f = cls.f0(x)
        return 1.0 / f - f


def _gw_regularised(s, t, tol):
    # Fold x -> 1/x (f0 and f1 are invariant) and write x = e^{-u}:
    # integrand (1 - e^{-t u}) e^{-(s - 1/2) u} / (2 sinh(u/2)) on (0, inf), doubled.
    sigma = s.real

    def integrand(u):
        reg = -np.expm1(-t * u)
        return reg * np.exp(-s * u) / (-np.expm1(-u))

    upper = 745.0 / sigma if sigma < 1e-2 else 46.0 / sigma
    breaks = [0.0, min(40.0 / t, 1.0), 1.0, max(upper, 2.0)]
    total = 0j
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi > lo:
            total += tanh_sinh(integrand, lo, hi, tol=tol).value
    return 2.0 * total - 2.0 * PvIntegrandPair.c * math.log(t)


def gauss_weil_pv(s, cutoff=2.0e5, tol=1e-13):
    """Principal value ``pv int_0^inf f0^{2s-1}/f1 dx/x`` (equals ``-2 psi(s)``).

    The regularised integral is evaluated at ``cutoff`` and ``2 cutoff`` and
    the leading ``1/t`` error is removed by one Richardson step.
    """
    s = complex(s)
    if not s.real > 0:
        raise DomainError("Gauss-Weil integral needs Re s > 0")
    if not cutoff > 0:
        raise ParameterError("cutoff must be positive")
    v1 = _gw_regularised(s, cutoff, tol)
    v2 = _gw_regularised(s, 2.0 * cutoff, tol)
    return 2.0 * v2 - v1


def gauss_weil_pv0(s, cutoff=2.0e5, tol=1e-13):
    """The ``pv_0`` normalisation: ``pv + 2 c log(2 pi)``."""
    return gauss_weil_pv(s, cutoff, tol) + 2.0 * PvIntegrandPair.c * math.log(2.0 * math.pi)
