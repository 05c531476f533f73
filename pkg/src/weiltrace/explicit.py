"""Term-by-term evaluation of explicit formulae.

Dirichlet form, for a primitive character ``chi`` mod ``q`` of parity ``a``
and ramification ``w = a + ib``:

    sum_rho g^(rho) = delta (g^(0) + g^(1))
                      - sum_n Lambda(n) (chi(n) g(n) + conj chi(n) g*(n))
                      + log(q) g(1) + A(g; a, b, M=2)

where the archimedean term ``A`` has a line-integral form

    A = (1/2 pi) int 2 Re[Gamma_k'/Gamma_k(1/2 + it + w)] g^(1/2 + it) dt

(``Gamma_R`` for ``M = 2``, ``Gamma_C`` for ``M = 1``) and the equivalent
kernel form

    A = -(2/M)(gamma + log(2 pi / M)) g(1)
        - int_1^inf {g x^{-ib} + g* x^{ib} - 2 x^{-(M-a)} g(1)} x^{M-1-a} / (x^M - 1) dx.

The continuous-spectral functional for ``SL_2(Z)`` is

    J(g) = -(1/4 pi) int m'/m(ir) g^(ir) dr,

computed by direct quadrature; ``weil_rhs_zeta`` assembles its explicit-side
expressions.
"""
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .characters import DirichletCharacter, von_mangoldt_table
from .errors import DomainError, ParameterError, TailError
from .quadrature import march_tail, panel_gauss, tanh_sinh
from .special import EULER_GAMMA, LOG_PI, digamma, m_logderiv
from .testfn import TestFunction, involution, inversion, mellin_many
from .zeros import ZeroList, zero_sum

DEFAULT_TOL = 1e-12
U_FLOOR = 1e-6
LINE_STEP = 0.5
LINE_LIMIT = 6000.0
VARIANTS = ("thm_1_1_as_stated", "thm_1_1_restated", "thm_1_1_sign_resolved", "thm_2_3")


@dataclass(frozen=True)
class ExplicitFormulaReport:
    """Signed contributions of every term; ``rhs_total`` is their plain sum.

    For the Dirichlet form the left side is the zero sum and it is not part
    of ``rhs_total``.  For the ``thm_1_1_*`` forms the left side is the
    spectral integral and the zero sum is one of the right-hand terms.
    """

    variant: str
    lhs: float
    lhs_label: str
    zero_sum_side: float
    zero_tail: float
    pole_term: float
    prime_sum: float
    conductor_term: float
    archimedean_term: float
    rhs_total: float
    residual: float
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _real(x, tol=1e-9):
    x = complex(x)
    if abs(x.imag) <= tol * max(1.0, abs(x.real)):
        return x.real
    return x


# ---------------------------------------------------------------------------
# finite pieces


def _character_values(chi, n):
    if chi is None:
        return np.ones(n.shape, dtype=complex)
    return chi.values[n % chi.modulus]


def prime_sum(g, chi=None):
    """``sum_n Lambda(n) (chi(n) g(n) + conj chi(n) g*(n))`` over the supports."""
    gs = involution(g)
    top = int(math.floor(max(g.support_hi, gs.support_hi)))
    if top < 2:
        return 0.0
    lam = von_mangoldt_table(top)
    n = np.flatnonzero(lam)
    c = _character_values(chi, n)
    total = np.sum(lam[n] * (c * g(n.astype(float)) + np.conj(c) * gs(n.astype(float))))
    return _real(total)


def prime_sum_plain(g):
    """``sum_n Lambda(n) g(n)``."""
    top = int(math.floor(g.support_hi))
    if top < 2:
        return 0.0
    lam = von_mangoldt_table(top)
    n = np.flatnonzero(lam)
    return _real(np.sum(lam[n] * g(n.astype(float))))


def pole_term(g, chi=None, tol=DEFAULT_TOL):
    """``delta (g^(0) + g^(1))``, i.e. ``delta int (g + g*) dx``."""
    if chi is not None and not chi.is_principal:
        return 0.0
    vals, _ = mellin_many(g, np.array([0.0, 1.0]), tol)
    return _real(vals.sum())


def _log_kernel(numer, weight, edges, u_max, tol):
    """``int_0^{u_max} numer(u) weight(u) du``; below ``U_FLOOR`` the integrand
    is held at its value there (the removable point ``u = 0`` is a 0/0)."""

    def integrand(u):
        uu = np.maximum(u, U_FLOOR)
        return numer(uu) * weight(uu)

    pts = sorted({0.0, u_max, *[e for e in edges if 0.0 < e < u_max]})
    return sum(tanh_sinh(integrand, lo, hi, tol=tol).value for lo, hi in zip(pts[:-1], pts[1:]))


def _reach(g):
    """``log`` of the largest ``x >= 1`` where ``g`` or ``g*`` is nonzero."""
    return max(math.log(g.support_hi), -math.log(g.support_lo), 0.0)


def archimedean_kernel_term(g, a=0.0, b=0.0, M=2, tol=DEFAULT_TOL):
    """Kernel form of the archimedean contribution of one place.

    ``M = 2`` is a real place (``Gamma_R``), ``M = 1`` a complex place
    (``Gamma_C``).
    """
    if M not in (1, 2):
        raise ParameterError("M must be 1 or 2")
    if a < 0:
        raise ParameterError("a must be nonnegative")
    gs = involution(g)
    g1 = complex(g(1.0))
    c = M - a

    def numer(u):
        x = np.exp(u)
        return g(x) * np.exp(-1j * b * u) + gs(x) * np.exp(1j * b * u) - 2.0 * np.exp(-c * u) * g1

    def weight(u):
        # x^{M-1-a} / (x^M - 1) dx with dx = x du
        return np.exp(-a * u) / (-np.expm1(-M * u))

    U = _reach(g)
    edges = [math.log(g.support_hi), -math.log(g.support_lo)]
    body = _log_kernel(numer, weight, edges, U, tol) if U > 0 else 0.0
    # beyond U only the subtraction survives: -2 g(1) / (x (x^M - 1))
    tail = 2.0 * g1 / M * math.log1p(-math.exp(-M * U)) if U > 0 else 0.0
    if U == 0 and g1 != 0:
        raise DomainError("g(1) != 0 needs support on both sides of 1")
    const = -(2.0 / M) * (EULER_GAMMA + math.log(2 * math.pi / M)) * g1
    return _real(const - (body + tail))


def _envelope_cutoff(abs_fn, tol, start=0.0, limit=LINE_LIMIT, noise=None):
    """Truncation point ``R`` of ``int_0^inf f`` with tail below ``tol / 10``."""
    est = march_tail(abs_fn, start, tol / 10.0, limit, LINE_STEP, noise=noise)
    if not math.isfinite(est.tail):
        raise TailError(f"line integral tail not below {tol:g} by t = {limit:g}", needed=limit)
    return est.cutoff, est.tail


def _gamma_logderiv(z, M):
    if M == 2:
        return -0.5 * LOG_PI + 0.5 * digamma(0.5 * z)
    return -math.log(2 * math.pi) + digamma(z)


def gamma_line_integral(g, a=0.0, b=0.0, M=2, tol=1e-11):
    """``(1/2 pi) int 2 Re[Gamma_k'/Gamma_k(1/2 + a + i(t + b))] g^(1/2 + it) dt``."""
    if M not in (1, 2):
        raise ParameterError("M must be 1 or 2")

    real = g._dtype.kind != "c"

    def both(t):
        # g^(1/2 + it) and g^(1/2 - it); the second is the conjugate for real g
        if real:
            v = mellin_many(g, 0.5 + 1j * t, 1e-13)[0]
            return v, np.conj(v)
        v = mellin_many(g, np.concatenate([0.5 + 1j * t, 0.5 - 1j * t]), 1e-13)[0]
        return v[: t.size], v[t.size:]

    def envelope(t):
        up, down = both(t)
        return (np.abs(up) + np.abs(down)) * np.log(np.e + t + abs(b))

    R, _ = _envelope_cutoff(envelope, tol)

    def integrand(t):
        g_up, g_down = both(t)
        up = 2.0 * _gamma_logderiv(0.5 + a + 1j * (t + b), M).real * g_up
        down = 2.0 * _gamma_logderiv(0.5 + a + 1j * (-t + b), M).real * g_down
        return up + down

    r = panel_gauss(integrand, 0.0, R, tol=tol * 0.1, min_panels=max(8, int(R / 4)))
    return _real(r.value / (2 * math.pi))


def conductor_term(g, chi=None):
    q = 1 if chi is None else chi.modulus
    return _real(math.log(q) * complex(g(1.0)))


def weil_rhs(g, chi=None, zeros=None, conj_zeros=None, arch="kernel", tol=DEFAULT_TOL):
    """Dirichlet explicit formula; ``chi=None`` means zeta.

    ``arch`` selects the kernel or line-integral archimedean evaluation.
    """
    if chi is not None and not chi.is_primitive:
        raise DomainError(f"character {chi.label} is not primitive")
    if chi is not None and chi.modulus == 1:
        chi = None
    a = 0.0 if chi is None else float(chi.parity)
    b = 0.0 if chi is None else float(chi.ramification[1])
    pole = pole_term(g, chi, tol)
    primes = -prime_sum(g, chi)
    cond = conductor_term(g, chi)
    if arch == "kernel":
        arch_val = archimedean_kernel_term(g, a, b, 2, tol)
    elif arch == "line":
        arch_val = gamma_line_integral(g, a, b, 2)
    else:
        raise ParameterError("arch must be 'kernel' or 'line'")
    rhs = pole + primes + cond + arch_val
    zs, tail = math.nan, math.nan
    if zeros is not None:
        if chi is not None and not chi.is_real and conj_zeros is None:
            raise ParameterError("a complex character needs the zeros of its conjugate")
        res = zero_sum(zeros, g, conj_zeros=conj_zeros)
        zs, tail = res.value, res.tail_bound
    meta = {"g": g.label, "chi": "zeta" if chi is None else chi.label, "arch_form": arch,
            "zeros": None if zeros is None else f"{zeros.source}:{zeros.height_limit:g}"}
    return ExplicitFormulaReport("thm_2_3", zs, "zero_sum", zs, tail, pole, primes, cond, arch_val,
                                 rhs, zs - rhs, meta)


# ---------------------------------------------------------------------------
# continuous spectral term for SL_2(Z)


def symmetrize(g):
    """``g_s(x) = (g(x) + g(1/x)) / 2``; ``J(g) = J(g_s)`` since ``m'/m(ir)`` is even."""
    flip = inversion(g)
    lo, hi = min(g.support_lo, flip.support_lo), max(g.support_hi, flip.support_hi)
    return TestFunction(lambda x: 0.5 * (g(x) + flip(x)), lo, hi, g.smooth, f"sym({g.label})")


def spectral_integrand(g, r):
    """``m'/m(ir) (g^(ir) + g^(-ir))`` for ``r >= 0`` (the even fold)."""
    if g._dtype.kind != "c":
        # real g: g^(-ir) = conj g^(ir)
        vals = mellin_many(g, 1j * r, 1e-13)[0]
        return m_logderiv(1j * r) * 2.0 * vals.real
    vals = mellin_many(g, np.concatenate([1j * r, -1j * r]), 1e-13)[0]
    return m_logderiv(1j * r) * (vals[: r.size] + vals[r.size:])


def spectral_lhs_zeta(g, tol=1e-11):
    """``-(1/4 pi) int m'/m(ir) g^(ir) dr`` by direct quadrature."""

    def gabs(t):
        if g._dtype.kind != "c":
            return 2.0 * np.abs(mellin_many(g, 1j * t, 1e-13)[0]) * np.log(np.e + t)
        v = mellin_many(g, np.concatenate([1j * t, -1j * t]), 1e-13)[0]
        return (np.abs(v[: t.size]) + np.abs(v[t.size:])) * np.log(np.e + t)

    R, _ = _envelope_cutoff(gabs, tol)
    r = panel_gauss(lambda t: spectral_integrand(g, t), 0.0, R, tol=tol * 0.1, min_panels=max(8, int(R / 4)))
    return _real(-r.value / (4 * math.pi))


def _printed_kernel(g, tol):
    """``int_1^inf {g + g* - 2 g(1)/x} x dx / (2 (x^2 - 1))``."""
    gs = involution(g)
    g1 = complex(g(1.0))

    def numer(u):
        x = np.exp(u)
        return g(x) + gs(x) - 2.0 * g1 * np.exp(-u)

    def weight(u):
        return -0.5 / np.expm1(-2.0 * u)

    U = _reach(g)
    body = _log_kernel(numer, weight, [math.log(g.support_hi), -math.log(g.support_lo)], U, tol) if U > 0 else 0.0
    x = math.exp(U)
    tail = -g1 * 0.5 * math.log((x + 1) / (x - 1)) if U > 0 else 0.0
    return _real(body + tail)


def _resolved_kernel(h, tol):
    """``int_1^inf {h(x) - h(1)/x} x dx / (x^2 - 1)``."""
    h1 = complex(h(1.0))

    def numer(u):
        return h(np.exp(u)) - h1 * np.exp(-u)

    def weight(u):
        return -1.0 / np.expm1(-2.0 * u)

    U = max(math.log(h.support_hi), 0.0)
    body = _log_kernel(numer, weight, [], U, tol) if U > 0 else 0.0
    x = math.exp(U)
    tail = -h1 * 0.5 * math.log((x + 1) / (x - 1)) if U > 0 else 0.0
    return _real(body + tail)


def _zero_side(zeros, g, variant):
    if zeros is None:
        return math.nan, math.nan
    if variant == "thm_1_1_sign_resolved":
        # sum over rho of (g^(rho) + g^(-rho)) / 2, the transform of g_s
        res = zero_sum(zeros, symmetrize(g))
    else:
        res = zero_sum(zeros, g)
    return res.value, res.tail_bound


def weil_rhs_zeta(g, variant="thm_1_1_sign_resolved", zeros=None, lhs=None, tol=DEFAULT_TOL):
    """Explicit side of the spectral identity for ``zeta``.

    ``thm_1_1_as_stated`` and ``thm_1_1_restated`` are the two printed
    forms; ``thm_1_1_sign_resolved`` is the form that matches the direct
    spectral quadrature:

        J(g) = sum_rho g_s^(rho) - int {g_s + g_s*/2} dx + sum_n Lambda(n) g_s(n)
               + int_1^inf {g_s(x) - g_s(1)/x} x dx/(x^2 - 1) + (log 4 pi + gamma) g(1) / 2

    with ``g_s(x) = (g(x) + g(1/x))/2``.
    """
    integral, primes, arch_val = spectral_explicit_terms(g, variant, tol)
    zs, tail = _zero_side(zeros, g, variant)
    rhs = zs + integral + primes + arch_val
    if lhs is None:
        lhs = spectral_lhs_zeta(g)
    meta = {"g": g.label, "zeros": None if zeros is None else f"{zeros.source}:{zeros.height_limit:g}"}
    return ExplicitFormulaReport(variant, lhs, "spectral_lhs", zs, tail, integral, primes, 0.0, arch_val,
                                 rhs, lhs - rhs, meta)


def spectral_explicit_terms(g, variant="thm_1_1_sign_resolved", tol=DEFAULT_TOL):
    """The zero-free terms of the spectral identity: ``(integral, primes, archimedean)``."""
    if variant not in VARIANTS[:3]:
        raise ParameterError(f"unknown variant {variant!r}")
    g1 = float(np.real(g(1.0)))
    if variant == "thm_1_1_sign_resolved":
        h = symmetrize(g)
        m0, m1 = mellin_many(h, np.array([0.0, 1.0]), tol)[0]
        integral = -_real(m1 + 0.5 * m0)
        primes = prime_sum_plain(h)
        arch_val = _resolved_kernel(h, tol) + 0.5 * (math.log(4 * math.pi) + EULER_GAMMA) * g1
    else:
        m0, m1 = mellin_many(g, np.array([0.0, 1.0]), tol)[0]
        sign = -1.0 if variant == "thm_1_1_as_stated" else 1.0
        integral = _real(sign * m1 - 0.25 * m0)
        primes = prime_sum_plain(g)
        const = math.log(4 * math.pi) + (-EULER_GAMMA if variant == "thm_1_1_as_stated" else EULER_GAMMA)
        arch_val = _printed_kernel(g, tol) + 0.5 * const * g1
    return integral, primes, arch_val


def resolve_sign_variant(functions, zeros, tol=1e-6):
    """Evaluate every printed and derived form against the direct spectral
    integral; returns ``{variant: [residuals]}``."""
    out = {v: [] for v in VARIANTS[:3]}
    for g in functions:
        lhs = spectral_lhs_zeta(g)
        for v in out:
            out[v].append(weil_rhs_zeta(g, v, zeros, lhs=lhs).residual)
    return out
