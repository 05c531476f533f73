"""Hot special-function kernels: numba and pure-numpy implementations.

Every public kernel takes a 1-D complex array and returns complex arrays of
the same length.  The two code paths compute the same formulas; which one is
bound to the module-level names is decided once at import by
:mod:`weiltrace._accel`.
"""
import math
from fractions import Fraction

import numpy as np

from ._accel import USE_NUMBA, njit

LOG_2PI_HALF = 0.5 * math.log(2.0 * math.pi)
STIRLING_RADIUS = 17.0
STIRLING_TERMS = 10
EM_TERMS = 24
EM_SLACK = 20
_CHUNK = 1 << 20


def _bernoulli_even(count):
    """B_2, B_4, ..., B_{2 count} as exact fractions (Akiyama-Tanigawa)."""
    size = 2 * count + 1
    a = [Fraction(0)] * (size + 1)
    out = []
    for m in range(size + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return out[:count]


_B2K = _bernoulli_even(max(EM_TERMS, STIRLING_TERMS) + 1)
# B_2k / (2k (2k-1)) for the log-gamma series, B_2k / 2k for digamma,
# B_2k / (2k)! for Euler-Maclaurin.
LGAMMA_COEF = np.array(
    [float(b / ((2 * k) * (2 * k - 1))) for k, b in enumerate(_B2K[:STIRLING_TERMS], 1)]
)
DIGAMMA_COEF = np.array([float(b / (2 * k)) for k, b in enumerate(_B2K[:STIRLING_TERMS], 1)])
EM_COEF = np.array(
    [float(b / math.factorial(2 * k)) for k, b in enumerate(_B2K[:EM_TERMS], 1)]
)


def em_cutoff(abs_s):
    """Direct-sum length that keeps the Euler-Maclaurin tail below 1e-15."""
    return int(abs_s / math.pi) + EM_SLACK


# ---------------------------------------------------------------------------
# numba path


@njit
def _lgamma_scalar(z, coef):
    acc = 0j
    while not (z.real >= 0.0 and abs(z) >= STIRLING_RADIUS):
        acc += np.log(z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0j
    p = inv
    for k in range(coef.shape[0]):
        series += coef[k] * p
        p *= inv2
    return (z - 0.5) * np.log(z) - z + LOG_2PI_HALF + series - acc


@njit
def _digamma_scalar(z, coef):
    acc = 0j
    while not (z.real >= 0.0 and abs(z) >= STIRLING_RADIUS):
        acc += 1.0 / z
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0j
    p = inv2
    for k in range(coef.shape[0]):
        series += coef[k] * p
        p *= inv2
    return np.log(z) - 0.5 * inv - series - acc


@njit
def _loggamma_nb(z, coef):
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        out[i] = _lgamma_scalar(z[i], coef)
    return out


@njit
def _digamma_nb(z, coef):
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        out[i] = _digamma_scalar(z[i], coef)
    return out


@njit
def _hurwitz_scalar(s, a, coef):
    n_terms = int(abs(s) / math.pi) + EM_SLACK
    val = 0j
    dval = 0j
    for n in range(n_terms):
        lx = math.log(n + a)
        t = np.exp(-s * lx)
        val += t
        dval -= lx * t
    x = n_terms + a
    lx = math.log(x)
    xs = np.exp(-s * lx)
    x1s = x * xs
    sm1 = s - 1.0
    val += x1s / sm1 + 0.5 * xs
    dval += -lx * x1s / sm1 - x1s / (sm1 * sm1) - 0.5 * lx * xs
    p = s
    dp = 1.0 + 0j
    xp = xs / x
    for k in range(coef.shape[0]):
        c = coef[k]
        val += c * p * xp
        dval += c * (dp - lx * p) * xp
        j = 2.0 * k + 1.0
        dp = dp * (s + j) + p
        p = p * (s + j)
        dp = dp * (s + j + 1.0) + p
        p = p * (s + j + 1.0)
        xp /= x * x
    return val, dval


@njit
def _hurwitz_nb(s, a, coef):
    val = np.empty(s.shape[0], dtype=np.complex128)
    dval = np.empty(s.shape[0], dtype=np.complex128)
    for i in range(s.shape[0]):
        v, d = _hurwitz_scalar(s[i], a, coef)
        val[i] = v
        dval[i] = d
    return val, dval


@njit
def _eta_scalar(s, coef):
    # eta(s) = s * zeta(1 + s), entire near s = 0
    u = 1.0 + s
    n_terms = int(abs(u) / math.pi) + EM_SLACK
    head = 0j
    dhead = 0j
    for n in range(n_terms):
        lx = math.log(n + 1.0)
        t = np.exp(-u * lx)
        head += t
        dhead -= lx * t
    x = n_terms + 1.0
    lx = math.log(x)
    xs = np.exp(-s * lx)
    xu = xs / x
    val = s * head + xs + 0.5 * s * xu
    dval = head + s * dhead - lx * xs + 0.5 * xu - 0.5 * s * lx * xu
    p = u
    dp = 1.0 + 0j
    xp = xu / x
    for k in range(coef.shape[0]):
        c = coef[k]
        val += c * s * p * xp
        dval += c * (p + s * dp - s * lx * p) * xp
        j = 2.0 * k + 1.0
        dp = dp * (u + j) + p
        p = p * (u + j)
        dp = dp * (u + j + 1.0) + p
        p = p * (u + j + 1.0)
        xp /= x * x
    return val, dval


@njit
def _eta_nb(s, coef):
    val = np.empty(s.shape[0], dtype=np.complex128)
    dval = np.empty(s.shape[0], dtype=np.complex128)
    for i in range(s.shape[0]):
        v, d = _eta_scalar(s[i], coef)
        val[i] = v
        dval[i] = d
    return val, dval


# ---------------------------------------------------------------------------
# numpy path


def _shift_to_stirling(z):
    shifts = np.zeros(z.shape, dtype=np.int64)
    w = z.copy()
    need = ~((w.real >= 0.0) & (np.abs(w) >= STIRLING_RADIUS))
    while need.any():
        shifts[need] += 1
        w[need] += 1.0
        need = ~((w.real >= 0.0) & (np.abs(w) >= STIRLING_RADIUS))
    return w, shifts


def _loggamma_np(z, coef=LGAMMA_COEF):
    w, shifts = _shift_to_stirling(z)
    acc = np.zeros(z.shape, dtype=np.complex128)
    for k in range(int(shifts.max(initial=0))):
        m = shifts > k
        acc[m] += np.log(z[m] + k)
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    p = inv
    for c in coef:
        series += c * p
        p = p * inv2
    return (w - 0.5) * np.log(w) - w + LOG_2PI_HALF + series - acc


def _digamma_np(z, coef=DIGAMMA_COEF):
    w, shifts = _shift_to_stirling(z)
    acc = np.zeros(z.shape, dtype=np.complex128)
    for k in range(int(shifts.max(initial=0))):
        m = shifts > k
        acc[m] += 1.0 / (z[m] + k)
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    p = inv2
    for c in coef:
        series += c * p
        p = p * inv2
    return np.log(w) - 0.5 * inv - series - acc


def _direct_sums(s, offsets):
    """sum_n (n + offset)^{-s} and its s-derivative, chunked over s."""
    lx = np.log(offsets)
    val = np.empty(s.shape, dtype=np.complex128)
    dval = np.empty(s.shape, dtype=np.complex128)
    step = max(1, _CHUNK // max(1, lx.size))
    for lo in range(0, s.size, step):
        sl = slice(lo, lo + step)
        e = np.exp(-np.multiply.outer(s[sl], lx))
        val[sl] = e.sum(axis=1)
        dval[sl] = -(e @ lx)
    return val, dval


def _bucketed(kernel, s, shift, *args):
    """Run ``kernel`` on groups of ``s`` that share a direct-sum length.

    A common length sized for the largest |s| would lose digits on the small
    points with Re s < 0, where the direct terms grow.
    """
    val = np.empty(s.shape, dtype=np.complex128)
    dval = np.empty(s.shape, dtype=np.complex128)
    cut = (np.abs(s + shift) / math.pi).astype(np.int64) // 8
    for c in np.unique(cut):
        m = cut == c
        val[m], dval[m] = kernel(s[m], int(c) * 8 + 7 + EM_SLACK, *args)
    return val, dval


def _hurwitz_np(s, a, coef=EM_COEF):
    return _bucketed(_hurwitz_block, s, 0.0, a, coef)


def _hurwitz_block(s, n_terms, a, coef):
    val, dval = _direct_sums(s, np.arange(n_terms) + a)
    x = n_terms + a
    lx = math.log(x)
    xs = np.exp(-s * lx)
    x1s = x * xs
    sm1 = s - 1.0
    val = val + x1s / sm1 + 0.5 * xs
    dval = dval - lx * x1s / sm1 - x1s / (sm1 * sm1) - 0.5 * lx * xs
    p = s.copy()
    dp = np.ones_like(s)
    xp = xs / x
    for k, c in enumerate(coef):
        val = val + c * p * xp
        dval = dval + c * (dp - lx * p) * xp
        j = 2.0 * k + 1.0
        dp = dp * (s + j) + p
        p = p * (s + j)
        dp = dp * (s + j + 1.0) + p
        p = p * (s + j + 1.0)
        xp = xp / (x * x)
    return val, dval


def _eta_np(s, coef=EM_COEF):
    return _bucketed(_eta_block, s, 1.0, coef)


def _eta_block(s, n_terms, coef):
    u = 1.0 + s
    head, dhead = _direct_sums(u, np.arange(n_terms) + 1.0)
    x = n_terms + 1.0
    lx = math.log(x)
    xs = np.exp(-s * lx)
    xu = xs / x
    val = s * head + xs + 0.5 * s * xu
    dval = head + s * dhead - lx * xs + 0.5 * xu - 0.5 * s * lx * xu
    p = u.copy()
    dp = np.ones_like(s)
    xp = xu / x
    for k, c in enumerate(coef):
        val = val + c * s * p * xp
        dval = dval + c * (p + s * dp - s * lx * p) * xp
        j = 2.0 * k + 1.0
        dp = dp * (u + j) + p
        p = p * (u + j)
        dp = dp * (u + j + 1.0) + p
        p = p * (u + j + 1.0)
        xp = xp / (x * x)
    return val, dval


# ---------------------------------------------------------------------------
# dispatch


def _as_c(z):
    return np.ascontiguousarray(np.asarray(z, dtype=np.complex128).ravel())


def loggamma_numba(z):
    return _loggamma_nb(_as_c(z), LGAMMA_COEF)


def digamma_numba(z):
    return _digamma_nb(_as_c(z), DIGAMMA_COEF)


def hurwitz_numba(s, a):
    return _hurwitz_nb(_as_c(s), float(a), EM_COEF)


def eta_numba(s):
    return _eta_nb(_as_c(s), EM_COEF)


def loggamma_numpy(z):
    return _loggamma_np(_as_c(z))


def digamma_numpy(z):
    return _digamma_np(_as_c(z))


def hurwitz_numpy(s, a):
    return _hurwitz_np(_as_c(s), float(a))


def eta_numpy(s):
    return _eta_np(_as_c(s))


if USE_NUMBA:
    loggamma, digamma, hurwitz, eta_one = loggamma_numba, digamma_numba, hurwitz_numba, eta_numba
else:
    loggamma, digamma, hurwitz, eta_one = loggamma_numpy, digamma_numpy, hurwitz_numpy, eta_numpy
