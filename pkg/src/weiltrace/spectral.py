"""Truncated continuous spectrum of ``SL_2(Z)``, the lower bound it yields for
zero sums, the Weil functional on convolution squares, and the scalar
Maass-Selberg relation.

Normalisation.  With ``m(s) = xi(s)/xi(1+s)`` the Maass-Selberg closed form

    F(s1, s2) = 2/(s1+s2) {phi1 conj(phi2) T^{s1+s2} - m(s1) conj(m(conj s2)) phi1 conj(phi2) T^{-(s1+s2)}}
              + 2/(s1-s2) {conj(m(conj s2)) phi1 conj(phi2) T^{s1-s2} - m(s1) phi1 conj(phi2) T^{-(s1-s2)}}

has the limit, as ``s1 = s + h``, ``s2 = -s`` and ``h -> 0``,

    L(s) = phi1 conj(phi2) {4 log T - 2 m'/m(s) + (m(-s) T^{2s} - m(s) T^{-2s}) / s}.

On ``s = it`` this is twice ``K_T(t) = 2 log T - m'/m(it) - Im(m(it) T^{-2it}) / t``,
a nonnegative function of ``t`` once ``T >= 1``.  The truncated spectral term is

    (1/8 pi) int L(it) g^(it) dt
        = g(1) log T - (1/4 pi) int m'/m(it) g^(it) dt - (1/4 pi i) pv int m(it) g^(it) T^{-2it} / t dt,

the middle integral being ``J(g)`` of the explicit module.  Only the even part
of ``t -> g^(it)`` contributes.
"""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, ParameterError, PoleError
from .explicit import _envelope_cutoff, _real, spectral_explicit_terms, spectral_lhs_zeta, symmetrize, weil_rhs
from .quadrature import filon, panel_gauss
from .special import m_logderiv, m_scalar
from .testfn import TestFunction, bump, mellin_many, mult_convolve
from .zeros import _zero_tail, zero_density, zero_sum

SQRT3_HALF = math.sqrt(3.0) / 2.0
FILON_START = 5.0
QUAD_ORDER = 16
FORMS = ("maass_selberg", "as_printed")


@dataclass(frozen=True)
class TruncationParams:
    T: float
    pv_epsilon: float = 1e-3
    line_cutoff: float = None  # None: chosen from the decay of g^(it)
    tol: float = 1e-11

    def __post_init__(self):
        if not self.T > 0:
            raise ParameterError(f"T must be positive, got {self.T}")
        if not self.pv_epsilon > 0:
            raise ParameterError("pv_epsilon must be positive")
        if self.line_cutoff is not None and not self.line_cutoff > FILON_START:
            raise ParameterError(f"line_cutoff must exceed {FILON_START}")

    def require_positivity_range(self):
        if not self.T > SQRT3_HALF:
            raise DomainError(f"the positivity statement needs T > sqrt(3)/2, got {self.T}")


@dataclass(frozen=True)
class MsrScalarState:
    s1: complex
    s2: complex
    phi1: complex = 1.0
    phi2: complex = 1.0
    T: float = 2.0

    def __post_init__(self):
        if not self.T > 0:
            raise ParameterError("T must be positive")


# ---------------------------------------------------------------------------
# Maass-Selberg relation (scalar case)


def _m(s):
    try:
        return m_scalar(s)
    except PoleError as exc:
        raise DomainError(str(exc)) from None


def msr_closed_form(state):
    s1, s2 = complex(state.s1), complex(state.s2)
    if s1 + s2 == 0 or s1 - s2 == 0:
        raise DomainError("the closed form needs s1 + s2 != 0 and s1 - s2 != 0")
    T, pp = state.T, complex(state.phi1) * complex(state.phi2).conjugate()
    m1 = _m(s1)
    m2 = _m(s2.conjugate()).conjugate()
    a, d = s1 + s2, s1 - s2
    first = 2.0 / a * pp * (T ** a - m1 * m2 * T ** (-a))
    second = 2.0 / d * pp * (m2 * T ** d - m1 * T ** (-d))
    return first + second


def msr_closed_form_dlogT(state):
    """Termwise ``d/d log T`` of :func:`msr_closed_form`."""
    s1, s2 = complex(state.s1), complex(state.s2)
    if s1 + s2 == 0 or s1 - s2 == 0:
        raise DomainError("the closed form needs s1 + s2 != 0 and s1 - s2 != 0")
    T, pp = state.T, complex(state.phi1) * complex(state.phi2).conjugate()
    m1 = _m(s1)
    m2 = _m(s2.conjugate()).conjugate()
    a, d = s1 + s2, s1 - s2
    return 2.0 * pp * (T ** a + m1 * m2 * T ** (-a)) + 2.0 * pp * (m2 * T ** d + m1 * T ** (-d))


def msr_limit(s, T, phi1=1.0, phi2=1.0, form="limit"):
    """``lim_{h->0} msr_closed_form(s + h, -s)``.

    ``form="printed"`` returns the alternative expression
    ``4 log T + 2 m'/m(s) + (conj(m(conj s)) T^s - m(s) T^{-s}) / s``, which is
    not the limit of the closed form and is kept for comparison.
    """
    s = complex(s)
    if s == 0:
        raise DomainError("the limit is singular at s = 0")
    if not T > 0:
        raise ParameterError("T must be positive")
    pp = complex(phi1) * complex(phi2).conjugate()
    ms = _m(s)
    ld = complex(m_logderiv(s))
    if form == "limit":
        return pp * (4.0 * math.log(T) - 2.0 * ld + (_m(-s) * T ** (2 * s) - ms * T ** (-2 * s)) / s)
    if form == "printed":
        return pp * (4.0 * math.log(T) + 2.0 * ld + (_m(s.conjugate()).conjugate() * T ** s - ms * T ** (-s)) / s)
    raise ParameterError(f"unknown form {form!r}")


def truncation_kernel(t, T):
    """``K_T(t) = L(it) / 2`` for real ``t``, with its removable point at 0."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = 2.0 * math.log(T) - m_logderiv(1j * t).real
    nz = t != 0
    out[nz] -= np.imag(m_scalar(1j * t[nz]) * T ** (-2j * t[nz])) / t[nz]
    # Im(m(it) T^{-2it}) / t -> -(m'/m(0) - 2 log T) at t = 0
    out[~nz] += m_logderiv(0.0).real - 2.0 * math.log(T)
    return out


# ---------------------------------------------------------------------------
# truncated spectral term


class _EvenTransform:
    """``e(t) = g^(it) + g^(-it)`` for ``t >= 0``, memoised on node arrays so a
    sweep over ``T`` reuses the Mellin values."""

    def __init__(self, g):
        self.g = g
        self.real = g._dtype.kind != "c"
        self._cache = {}

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        key = (t.size, float(t[0]), float(t[-1])) if t.size else (0,)
        if key not in self._cache:
            if self.real:
                v = 2.0 * mellin_many(self.g, 1j * t, 1e-13)[0].real
            else:
                both = mellin_many(self.g, np.concatenate([1j * t, -1j * t]), 1e-13)[0]
                v = both[: t.size] + both[t.size:]
            self._cache[key] = v
        return self._cache[key]

    def envelope(self, t):
        return np.abs(self(t)) * np.log(np.e + t)


@lru_cache(maxsize=32)
def _even_transform(g):
    return _EvenTransform(g)


def _cutoff(even, params):
    if params.line_cutoff is not None:
        return params.line_cutoff
    R, _ = _envelope_cutoff(even.envelope, params.tol)
    return max(R, 2.0 * FILON_START)


def _richardson_window(f, eps):
    """``int_0^eps f`` removed by a symmetric exclusion, restored by
    extrapolating the truncated integrals at ``eps, eps/2, eps/4`` to zero
    width (errors ``O(eps), O(eps^2)`` eliminated)."""
    x, w = np.polynomial.legendre.leggauss(QUAD_ORDER)

    def piece(a, b):
        t = 0.5 * (b - a) * x + 0.5 * (a + b)
        return 0.5 * (b - a) * np.sum(w * f(t))

    p1 = piece(eps / 2, eps)
    p2 = piece(eps / 4, eps / 2)
    # I(e) = I0 - c1 e - c2 e^2 - ...; I(e/2) = I(e) + p1, I(e/4) = I(e/2) + p2.
    # r1, r2 are the first Richardson values 2 I(e/2) - I(e), 2 I(e/4) - I(e/2), less I(e)
    r1 = 2.0 * p1
    r2 = 2.0 * (p1 + p2) - p1
    return (4.0 * r2 - r1) / 3.0


def pv_term(g, params, form="maass_selberg"):
    """``-(1/4 pi i) pv int m(it) g^(it) T^{-2it} / t dt`` (``maass_selberg``)
    or ``+(1/4 pi i) pv int m(it) g^(it) T^{it} / t dt`` (``as_printed``).

    The odd singularity ``m(0) g^(0) / t`` cancels in the symmetric principal
    value; after folding ``t -> -t`` the integrand is regular.  The window
    ``[0, pv_epsilon]`` is excluded and restored by Richardson extrapolation in
    its width; ``[pv_epsilon, 5]`` uses Gauss panels and ``[5, R]`` a Filon
    rule carrying ``T^{-2it}`` (resp. ``T^{it}``) exactly.
    """
    if form not in FORMS:
        raise ParameterError(f"unknown form {form!r}")
    even = _even_transform(g)
    T, eps = params.T, params.pv_epsilon
    # folding t -> -t turns either integral into
    #   sign/(4 pi) int_0^inf e(t) Im(m(it) e^{i omega t}) / t dt,  e(t) = g^(it) + g^(-it)
    sign, omega = (-1.0, -2.0 * math.log(T)) if form == "maass_selberg" else (1.0, math.log(T))

    def folded(t):
        return even(t) * np.imag(m_scalar(1j * t) * np.exp(1j * omega * t)) / t

    R = _cutoff(even, params)
    near = panel_gauss(folded, eps, FILON_START, tol=params.tol, order=QUAD_ORDER).value
    near += _richardson_window(folded, eps)
    panels = max(4, int((R - FILON_START) / 2))
    up = filon(lambda t: m_scalar(1j * t) * even(t) / t, FILON_START, R, omega, tol=params.tol,
               order=QUAD_ORDER, min_panels=panels).value
    down = filon(lambda t: np.conj(m_scalar(1j * t)) * even(t) / t, FILON_START, R, -omega, tol=params.tol,
                 order=QUAD_ORDER, min_panels=panels).value
    far = (up - down) / 2j
    return _real(sign * (near + far) / (4.0 * math.pi))


def truncated_spectral_term(g, params, form="maass_selberg", spectral=None):
    """``g(1) log T + J(g) + pv_term``; ``J(g)`` may be supplied to reuse it."""
    if not isinstance(params, TruncationParams):
        params = TruncationParams(float(params))
    J = spectral_lhs_zeta(g, params.tol) if spectral is None else spectral
    g1 = float(np.real(g(1.0)))
    return g1 * math.log(params.T) + J + pv_term(g, params, form)


@dataclass(frozen=True)
class BoundRow:
    T: float
    g1_log_T: float
    pv: float
    explicit_terms: float
    bound: float
    zero_sum: float
    slack: float
    truncated_term: float


def lower_bound_rhs(g, T, pv=None, explicit_terms=None, form="maass_selberg", tol=1e-11):
    """Zero-free lower bound for ``sum_rho g_s^(rho)``.

    From ``TST = g(1) log T + J(g) + pv >= 0`` and
    ``J(g) = sum_rho g_s^(rho) + E(g)`` the bound is ``-E(g) - g(1) log T - pv``.
    """
    params = TruncationParams(float(T), tol=tol)
    params.require_positivity_range()
    if explicit_terms is None:
        explicit_terms = sum(spectral_explicit_terms(g, "thm_1_1_sign_resolved"))
    if pv is None:
        pv = pv_term(g, params, form)
    g1 = float(np.real(g(1.0)))
    return -explicit_terms - g1 * math.log(T) - pv


def bound_sweep(g, zeros, T_grid, form="maass_selberg", tol=1e-11):
    """Lower bound and slack over a grid of ``T``; returns a list of :class:`BoundRow`."""
    E = sum(spectral_explicit_terms(g, "thm_1_1_sign_resolved"))
    zs = zero_sum(zeros, symmetrize(g)).value
    J = spectral_lhs_zeta(g, tol)
    g1 = float(np.real(g(1.0)))
    rows = []
    for T in T_grid:
        params = TruncationParams(float(T), tol=tol)
        pv = pv_term(g, params, form)
        bound = lower_bound_rhs(g, T, pv=pv, explicit_terms=E, form=form, tol=tol)
        rows.append(BoundRow(float(T), g1 * math.log(T), pv, E, bound, zs, zs - bound,
                             g1 * math.log(T) + J + pv))
    return rows


def log_grid(lo, hi, n):
    """``n`` log-spaced points in ``(lo, hi]``."""
    if not 0 < lo < hi:
        raise ParameterError("need 0 < lo < hi")
    return list(np.exp(np.linspace(math.log(lo), math.log(hi), n + 1)[1:]))


# ---------------------------------------------------------------------------
# Weil functional on convolution squares


@dataclass(frozen=True)
class WeilValue:
    abs_square: float
    generic: float
    explicit_side: float
    tail_bound: float

    @property
    def agreement(self):
        return abs(self.abs_square - self.generic)


def weil_functional(g0, zeros, g=None, tol=1e-13):
    """``W(g)`` for ``g = g0 * conj(g0)*``, three ways.

    ``abs_square`` sums ``|g0^(rho)|^2`` (the form of ``g^`` on the critical
    line), ``generic`` runs :func:`zero_sum` on the interpolated square, and
    ``explicit_side`` evaluates the prime and archimedean side, which needs no
    zeros.
    """
    if zeros.lfunction_id != "zeta":
        raise ParameterError("the Weil functional is evaluated for zeta")
    if g0._dtype.kind == "c":
        raise ParameterError("g0 must be real")
    if g is None:
        g = mult_convolve(g0)
    gam = zeros.gammas
    vals = mellin_many(g0, 0.5 + 1j * gam, tol)[0]
    direct = float(2.0 * np.sum(np.abs(vals) ** 2))

    def g_abs(t):
        return 2.0 * np.abs(mellin_many(g0, 0.5 + 1j * t, tol)[0]) ** 2

    scale = float(np.abs(mellin_many(g0, np.array([0.5]), tol)[0][0])) ** 2 + 1e-300
    noise = 2e3 * np.finfo(float).eps * scale * float(zero_density(2.0 * zeros.height_limit + 10.0))
    tail, _, _ = _zero_tail(g_abs, zeros.height_limit, 0.0, 1e-15, noise)
    generic = zero_sum(zeros, g)
    explicit = weil_rhs(g).rhs_total
    return WeilValue(direct, float(np.real(generic.value)), float(explicit), max(tail, generic.tail_bound))


def _shape(half, coeffs, label):
    base = bump(half)

    def evaluate(x):
        u = np.log(x) / half
        return base.evaluate(x) * np.polyval(coeffs, u)

    return TestFunction(evaluate, base.support_lo, base.support_hi, True, f"{label}(half={half:.17g})")


def g0_family(t):
    """Real ``g0`` with log-support ``[-t/2, t/2]``, so that the square has
    additive support ``[-t, t]``."""
    half = 0.5 * t
    return [
        _shape(half, [1.0], "bump"),
        _shape(half, [1.0, 0.0], "bump*u"),
        _shape(half, [1.0, 1.0], "bump*(1+u)"),
        _shape(half, [-4.0, 0.0, 1.0], "bump*(1-4u^2)"),
    ]


@dataclass(frozen=True)
class ScanRow:
    t: float
    shape: str
    abs_square: float
    generic: float
    explicit_side: float
    tail_bound: float


def positivity_scan(support_grid, zeros):
    """``W`` over the shape family at each additive half-length ``t``."""
    rows = []
    for t in support_grid:
        if not t > 0:
            raise ParameterError("support half-lengths must be positive")
        for g0 in g0_family(float(t)):
            w = weil_functional(g0, zeros)
            rows.append(ScanRow(float(t), g0.label, w.abs_square, w.generic, w.explicit_side, w.tail_bound))
    return rows


def scan_minimum(rows):
    """Minimum functional value per ``t``."""
    out = {}
    for r in rows:
        out[r.t] = min(out.get(r.t, math.inf), r.abs_square)
    return out


# ---------------------------------------------------------------------------
# output


def rows_to_csv(rows):
    rows = list(rows)
    if not rows:
        return ""
    buf = io.StringIO()
    fields = list(asdict(rows[0]))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in asdict(r).values()])
    return buf.getvalue()


def sweep_summary(rows):
    rows = list(rows)
    worst = min(rows, key=lambda r: r.slack)
    return {"min_slack": worst.slack, "at_T": worst.T, "points": len(rows)}


def summary_json(summary):
    return json.dumps(summary, sort_keys=True)
