"""Critical-line zeros of zeta and Dirichlet L-functions.

Zeros are located as sign changes of a real rotation of the L-function on
the line ``Re s = 1/2`` and refined by bisection.  For zeta this is Hardy's
``Z(t) = e^{i theta(t)} zeta(1/2 + it)``; for a primitive character ``chi``
mod ``q`` with parity ``a`` it is

    Z_chi(t) = W^{-1/2} (q/pi)^{it/2} e^{i Im log Gamma((1/2 + a + it)/2)} L(1/2 + it, chi),

which is real because the completed L-function satisfies
``Lambda(s, chi) = W Lambda(1 - s, conj chi)``.
"""
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .characters import character
from .errors import DomainError, IncompleteScanError, ParameterError, TailError, ZeroFileError
from .quadrature import march_tail
from .testfn import abs_mellin_scale, mellin_many

SCAN_STEP = 0.05
BRACKET_WIDTH = 1e-9
MAX_HEIGHT = 1000.0
LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class ZeroList:
    gammas: np.ndarray = field(repr=False)
    lfunction_id: str
    height_limit: float
    source: str
    rh_verified: bool = True

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.size and (np.any(np.diff(g) <= 0) or g[0] <= 0 or g[-1] > self.height_limit):
            raise ParameterError("zeros must be positive, strictly ascending and below height_limit")
        object.__setattr__(self, "gammas", g)

    def __len__(self):
        return self.gammas.size

    def below(self, height):
        g = self.gammas[self.gammas <= height]
        return ZeroList(g, self.lfunction_id, min(height, self.height_limit), self.source, self.rh_verified)


# ---------------------------------------------------------------------------
# real rotations on the critical line


@dataclass(frozen=True)
class _LFunction:
    lfunction_id: str
    modulus: int
    parity: int
    values: np.ndarray = field(repr=False)
    rotation: complex

    @property
    def conductor_log(self):
        return math.log(self.modulus)


def lfunction(lfunction_id):
    """Resolve ``"zeta"`` or ``"dirichlet:q.index"`` (primitive characters only)."""
    if lfunction_id == "zeta":
        return _LFunction("zeta", 1, 0, np.ones(1, dtype=complex), 1.0 + 0j)
    if not lfunction_id.startswith("dirichlet:"):
        raise ParameterError(f"unknown L-function id {lfunction_id!r}")
    chi = character(lfunction_id.split(":", 1)[1])
    if chi.modulus == 1:
        return lfunction("zeta")
    if not chi.is_primitive:
        raise DomainError(f"{lfunction_id} is not primitive; use the inducing character mod {chi.conductor}")
    return _LFunction(lfunction_id, chi.modulus, chi.parity, chi.values, chi.root_number ** -0.5)


def theta(t, lfun=None):
    """Phase making the L-function real on the critical line.

    For zeta this is the Riemann-Siegel theta function
    ``Im log Gamma(1/4 + it/2) - (t/2) log pi``.
    """
    t = np.asarray(t, dtype=float)
    q, a = (1, 0) if lfun is None else (lfun.modulus, lfun.parity)
    lg = _kernels.loggamma(0.5 * (0.5 + a + 1j * t.ravel())).reshape(t.shape)
    return lg.imag + 0.5 * t * (math.log(q) - LOG_PI)


def l_on_line(t, lfun):
    """``L(1/2 + it)`` for the resolved L-function."""
    s = 0.5 + 1j * np.asarray(t, dtype=float).ravel()
    q = lfun.modulus
    if q == 1:
        return _kernels.hurwitz(s, 1.0)[0]
    total = np.zeros(s.shape, dtype=complex)
    for r in range(1, q):
        c = lfun.values[r]
        if c != 0:
            total += c * _kernels.hurwitz(s, r / q)[0]
    return total * np.exp(-s * math.log(q))


def rotated(t, lfun):
    """The complex rotation; its imaginary part is rounding noise."""
    t = np.asarray(t, dtype=float)
    val = lfun.rotation * np.exp(1j * theta(t, lfun).ravel()) * l_on_line(t, lfun)
    return val.reshape(t.shape)


def hardy_z(t, lfunction_id="zeta"):
    return rotated(t, lfunction(lfunction_id)).real


# ---------------------------------------------------------------------------
# counting


def rvm_estimate(T, lfun=None):
    """Smooth part of the zero count ``N(T)`` on ``0 < gamma <= T``.

    For zeta ``theta(T)/pi + 1``, the Riemann-von Mangoldt main term
    ``(T/2 pi) log(T / 2 pi e) + 7/8`` up to ``O(1/T)``.  For a Dirichlet
    L-function ``(theta(T) - theta(0))/pi``, since the rotation constant is
    chosen so that ``Z_chi`` is real.
    """
    if lfun is None or lfun.modulus == 1:
        return float(theta(np.array([T]))[0] / math.pi + 1.0)
    return float((theta(np.array([T]), lfun)[0] - theta(np.array([0.0]), lfun)[0]) / math.pi)


def _scan(lfun, t_lo, t_hi, step):
    n = max(2, int(math.ceil((t_hi - t_lo) / step)) + 1)
    grid = np.linspace(t_lo, t_hi, n)
    z = rotated(grid, lfun).real
    idx = np.flatnonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)
    exact = grid[z == 0.0]
    lo, hi = grid[idx], grid[idx + 1]
    return lo, hi, z[idx], exact


def _bisect(lfun, lo, hi, zlo):
    lo, hi, zlo = lo.copy(), hi.copy(), zlo.copy()
    while lo.size and np.max(hi - lo) > BRACKET_WIDTH:
        mid = 0.5 * (lo + hi)
        zm = rotated(mid, lfun).real
        same = np.sign(zm) == np.sign(zlo)
        lo = np.where(same, mid, lo)
        zlo = np.where(same, zm, zlo)
        hi = np.where(same, hi, mid)
    return lo, hi


def count_deviation(gammas, heights, lfun=None):
    """``#{gamma <= T} - estimate(T)`` at each of ``heights``."""
    gammas = np.asarray(gammas)
    return np.array([np.searchsorted(gammas, T, side="right") - rvm_estimate(T, lfun) for T in heights])


def _check_heights(gammas, t_max):
    # Between two consecutive zeros the count is constant, so the midpoints
    # measure the smooth deviation without the jump at each zero.
    if gammas.size < 2:
        return np.array([t_max])
    mids = 0.5 * (gammas[1:] + gammas[:-1])
    return np.append(mids, t_max)


def compute_zeros(lfunction_id, t_max, step=SCAN_STEP, t_min=None):
    """Scan for sign changes on a grid of ``step`` and bisect each bracket.

    The count up to ``t_max`` is compared with the smooth estimate; a gap of
    more than one triggers a rescan at half the step, twice at most.
    """
    if not 0 < t_max <= MAX_HEIGHT:
        raise ParameterError(f"t_max must lie in (0, {MAX_HEIGHT:g}]")
    lfun = lfunction(lfunction_id)
    t_lo = step if t_min is None else t_min
    for attempt in range(3):
        lo, hi, zlo, exact = _scan(lfun, t_lo, t_max, step)
        lo, hi = _bisect(lfun, lo, hi, zlo)
        gammas = np.sort(np.concatenate([0.5 * (lo + hi), exact]))
        heights = np.array([t_max])
        dev = count_deviation(gammas, heights, lfun)
        if abs(dev[-1]) <= 1.0 + 1e-9:
            break
        step *= 0.5
    else:
        raise IncompleteScanError(
            f"{lfunction_id}: {gammas.size} zeros up to {t_max:g}, estimate {rvm_estimate(t_max, lfun):.3f}",
            interval=(t_lo, t_max),
        )
    return ZeroList(gammas, lfun.lfunction_id, float(t_max), "computed", True)


# ---------------------------------------------------------------------------
# files and cache


def load_zeros(path, lfunction_id):
    """One ordinate per line, ascending; blank lines and ``#`` comments are skipped."""
    gammas = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                g = float(line.split()[0])
            except ValueError:
                raise ZeroFileError(f"cannot parse {line!r} as a number", lineno) from None
            if not math.isfinite(g) or g <= 0:
                raise ZeroFileError(f"ordinate must be positive and finite, got {line!r}", lineno)
            if gammas and g <= gammas[-1]:
                raise ZeroFileError("ordinates are not strictly ascending", lineno)
            gammas.append(g)
    height = gammas[-1] if gammas else 0.0
    return ZeroList(np.array(gammas), lfunction_id, height, "file", True)


def save_zeros(zeros, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {zeros.lfunction_id} zeros to height {zeros.height_limit:.17g} ({zeros.source})"]
    lines += [f"{g:.17g}" for g in zeros.gammas]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def cache_dir(override=None):
    root = override or os.environ.get("APP_CACHE") or Path.home() / ".cache" / "weiltrace"
    return Path(root) / "zeros"


def cache_path(lfunction_id, root=None):
    return cache_dir(root) / f"{lfunction_id.replace(':', '_')}.txt"


def cached_zeros(lfunction_id, t_max, root=None):
    """Zeros to ``t_max``, read from the cache when it reaches that height."""
    path = cache_path(lfunction_id, root)
    if path.exists():
        with open(path, encoding="utf-8") as fh:
            header = fh.readline()
        try:
            height = float(header.split("height")[1].split()[0])
        except (IndexError, ValueError):
            height = 0.0
        if height >= t_max:
            z = load_zeros(path, lfunction_id)
            return ZeroList(z.gammas[z.gammas <= t_max], lfunction_id, float(t_max), "computed", True)
    z = compute_zeros(lfunction_id, t_max)
    try:
        save_zeros(z, path)
    except OSError:
        pass
    return z


# ---------------------------------------------------------------------------
# sums over zeros


def zero_density(t, log_conductor=0.0):
    """Approximate zeros per unit height, ``log(q t / 2 pi) / 2 pi``."""
    return np.maximum(np.log(np.maximum(t, 1.0) / (2 * math.pi)) + log_conductor, 1.0) / (2 * math.pi)


@dataclass(frozen=True)
class ZeroSum:
    value: float
    tail_bound: float
    count: int


def _zero_tail(g_abs_fn, height, log_conductor, tol, noise):
    """Bound ``sum_{gamma > height} |g^(rho)|`` through the zero density and a
    sampled decay envelope of ``|g^|``; the factor 1.5 absorbs the density's
    lower-order terms and local clustering of zeros."""

    def weighted(t):
        return g_abs_fn(t) * zero_density(t + 1.0, log_conductor)

    est = march_tail(weighted, height, tol, height + 20000.0, step=0.25, noise=noise)
    return 1.5 * est.total, 1.5 * est.total <= tol, est


def zero_sum(zeros, g, tol=None, conj_zeros=None, mellin_tol=1e-13):
    """``sum_rho g^(rho)`` with ``rho = 1/2 + i gamma`` over the stored range.

    The zero set is closed under ``rho -> conj(rho)`` when the character is
    real; for a complex character pass the zeros of the conjugate L-function
    as ``conj_zeros`` (their ordinates enter as ``1/2 - i gamma``).
    """
    if not zeros.rh_verified:
        raise DomainError("zero list is not verified on the critical line")
    log_q = 0.0
    if zeros.lfunction_id.startswith("dirichlet:"):
        log_q = math.log(int(zeros.lfunction_id.split(":")[1].split(".")[0]))
    upper = zeros.gammas
    lower = upper if conj_zeros is None else conj_zeros.gammas
    s = np.concatenate([0.5 + 1j * upper, 0.5 - 1j * lower])
    vals = mellin_many(g, s, mellin_tol)[0] if s.size else np.zeros(0)
    value = complex(np.sum(vals))

    def g_abs(t):
        out = np.abs(mellin_many(g, 0.5 + 1j * t, mellin_tol)[0])
        if conj_zeros is not None:
            out = np.maximum(out, np.abs(mellin_many(g, 0.5 - 1j * t, mellin_tol)[0]))
        return 2.0 * out

    height = zeros.height_limit
    if conj_zeros is not None:
        height = min(height, conj_zeros.height_limit)
    noise = 2e3 * np.finfo(float).eps * abs_mellin_scale(g) * float(zero_density(2.0 * height + 10.0, log_q))
    tail, ok, est = _zero_tail(g_abs, height, log_q, 1e-3 * (tol if tol is not None else 1e-9), noise)
    if tol is not None and tail > tol:
        needed = est.cutoff
        raise TailError(
            f"zero tail bound {tail:.3g} exceeds {tol:g}; zeros to height {needed:.0f} are needed",
            estimate=value.real, error=tail, needed=needed,
        )
    return ZeroSum(value.real if abs(value.imag) <= 1e-9 * max(1.0, abs(value)) else value, tail, int(s.size))
